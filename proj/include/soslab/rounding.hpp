#pragma once

// Rounding and distinguishing algorithms: GW hyperplane rounding on unit
// vectors, propagation rounding driven by inclusion-exclusion conditioners
// with seed-set column selection, conditioning a clique solution on a vertex,
// and the planted-clique distinguisher.
//
// Trials and hyperplane samples draw from per-index RNG substreams and are
// stored per index before reduction, so results are independent of thread
// count and schedule.

#include <cstdint>
#include <string>
#include <vector>

#include "soslab/instances.hpp"
#include "soslab/relaxations.hpp"

namespace soslab::round {

// U_{S,alpha} for every assignment alpha: S -> {0,1}.  vectors[mask] is the
// conditioner for the assignment sending base[i] to bit i of mask.
struct ConditionerSet {
    Key base;
    std::vector<std::vector<double>> vectors;  // size 1 << |base|
};

struct GwResult {
    double best = 0.0;           // best cut over samples
    double mean = 0.0;           // mean cut
    double se = 0.0;             // standard error of the mean
    std::vector<int> best_side;  // one side of the best cut, sorted
};

struct RoundingOutcome {
    std::vector<int> chosen;      // R' of the best trial, sorted
    double value = 0.0;           // edges cut by the best trial (minimized)
    Key seed_set;                 // selected S
    std::vector<int> assignment;  // alpha drawn in the best trial, per base position
    std::vector<double> probs;    // per-vertex inclusion probabilities of the best trial
    double mean_value = 0.0;      // mean cut over trials
    double mean_size = 0.0;       // mean |R'| over trials
    double expected_size = 0.0;   // sum_u <V_phi, V_u>; equals k on feasible input
    double diagnostic = 0.0;      // d * sum_u ||Pi_perp V_u||^2 for the selected S
};

// Sign-of-projection rounding against `samples` random hyperplanes.
// Requires one nonzero vector per vertex, all of equal dimension.
GwResult gw_round(const std::vector<std::vector<double>>& vectors, const inst::Graph& g,
                  int samples, std::uint64_t seed);

// U_{S,alpha} = sum over alpha^{-1}(1) <= T <= S of (-1)^{|T| - |alpha^{-1}(1)|} V_T.
// Requires every subset of S to be present in the solution.
ConditionerSet build_conditioners(const relax::SosSolution& sol, const Key& s);

enum class SelectMode { exhaustive, greedy };

// sum_i ||Pi_perp v_i||^2 where Pi_perp projects away span{columns[c] : c in chosen}.
double projection_residual(const std::vector<std::vector<double>>& columns,
                           const std::vector<int>& chosen);

// rprime column indices (sorted) whose span minimizes the residual above;
// exhaustive scans all subsets (budget-checked), greedy is pivoted selection.
std::vector<int> select_columns(const std::vector<std::vector<double>>& columns, int r,
                                int rprime, SelectMode mode);

// Propagation rounding of a solved bisection relaxation (level >= rprime+1).
// Regular graphs only unless allow_irregular; then d = max degree in the
// diagnostic.  Returns the best of `trials` independent draws.
RoundingOutcome gs_round(const relax::SosSolution& sol, const inst::Graph& g, int k, int r,
                         int rprime, double eps, std::uint64_t seed, int trials,
                         bool allow_irregular = false);

// Conditioning a clique solution at level r+1 on vertex w: U_S =
// V_{S u {w}} / ||V_w||, restricted to the neighbors of w and relabeled.
struct Conditioned {
    relax::SosSolution solution;  // level r, on the relabeled graph
    inst::Graph graph;            // G_w: neighbors of w, induced edges
    std::vector<int> labels;      // new index -> original vertex
};
Conditioned condition_on_vertex(const relax::SosSolution& sol, const inst::Graph& g, int w);

enum class Label { random_graph, planted };

struct DistinguishResult {
    Label label = Label::random_graph;
    double frac = 0.0;       // level-r clique relaxation value
    double threshold = 0.0;  // 4 sqrt(n) / ((1-eps) sqrt(2))^{r+1}
};
DistinguishResult distinguish_planted(const inst::Graph& g, int r, double eps,
                                      double tol = 1e-5);

std::string outcome_to_json(const RoundingOutcome& o);
std::string gw_to_json(const GwResult& r);

}  // namespace soslab::round
