#pragma once

// Level-r SoS relaxations.
//
// A relaxation is a moment matrix indexed by monomial keys (subsets of [n] of
// size <= r, or labeled subsets for CSPs) together with the linear side
// constraints of the problem at hand.  Consistency -- <V_S1,V_S2> may depend
// only on S1 u S2 -- is encoded structurally: all matrix entries sharing a
// union live in one entry class of the underlying SdpProblem, which spans the
// same affine set as the quadratically many pairwise equalities.  Hard zeros
// (forbidden pairs, label clashes) and ||V_phi||^2 = 1 become pins.
//
// Two kinds are plain SDPs rather than moment matrices: maxcut_gw is the
// Goemans-Williamson program (unit diagonal, free off-diagonals) and theta is
// the Lovasz theta function in either its primal (trace-one) or dual
// (min-lambda-max) form.  Both index rows by singleton keys and have no phi.

#include <map>
#include <string>
#include <vector>

#include "soslab/instances.hpp"
#include "soslab/poly.hpp"
#include "soslab/sdp.hpp"

namespace soslab::relax {

enum class Kind { generic, clique, mis, csp, dks, dksh, bisection, ssbve, maxcut_gw, theta };

std::string kind_name(Kind k);
Kind kind_from_name(const std::string& s);

// Numeric parameters. Recognized names: "k" (dks/dksh/bisection cardinality),
// "l" (ssbve cardinality), "dual" (theta: nonzero picks the min-lambda-max
// form), "max_keys" (override of the key-count budget, default kMaxDim).
using Params = std::map<std::string, double>;

// maximize objective(x) subject to constraints[i](x) >= 0 over x in {0,1}^n.
// All degrees must be <= the requested level.
struct GenericProgram {
    int n = 0;
    poly::MultilinearPoly objective;
    std::vector<poly::MultilinearPoly> constraints;
};

// One objective term: coef * <V_keys[i], V_keys[j]>.
struct ObjectiveEntry {
    int i = 0, j = 0;
    double coef = 0.0;
};

struct SosRelaxation {
    Kind kind = Kind::generic;
    int level = 1;
    int n_vars = 0;  // underlying variable/vertex count
    int q = 0;       // csp alphabet size, 0 otherwise

    // Keys in size-then-lex order; keys[0] is phi for moment kinds.  The
    // letters vector is empty everywhere except for csp keys.
    std::vector<LabeledKey> keys;
    std::map<LabeledKey, int> key_index;

    sdp::SdpProblem sdp;  // row/column i corresponds to keys[i]

    // objective = sum coef * <V_i, V_j> + sdp.objective_const.
    std::vector<ObjectiveEntry> objective_keys;
};

// Solution vectors, one per key.  dim is the common ambient dimension.
struct SosSolution {
    int level = 0;
    int dim = 0;
    std::map<LabeledKey, std::vector<double>> vectors;
};

SosRelaxation build_relaxation(Kind kind, const inst::Graph& g, const Params& params, int r);
SosRelaxation build_relaxation(Kind kind, const inst::BipartiteGraph& g, const Params& params,
                               int r);
SosRelaxation build_relaxation(Kind kind, const inst::Hypergraph& h, const Params& params, int r);
SosRelaxation build_relaxation(Kind kind, const inst::CspInstance& c, const Params& params, int r);
SosRelaxation build_relaxation(const GenericProgram& prog, const Params& params, int r);

struct SolveResult {
    SosSolution solution;
    double frac = 0.0;      // the SDP objective at the returned point
    sdp::SdpSolution stats;  // raw solver output (residuals, iterations, matrix)
};

SolveResult solve_relaxation(const SosRelaxation& rel, double tol = 1e-6, int max_iter = 50000,
                             const sdp::SolveOptions& opt = {});

// Objective recomputed from a solution's vectors (should match frac up to the
// gram factorization error).
double objective_value(const SosRelaxation& rel, const SosSolution& sol);

struct Violation {
    std::string id;
    double magnitude = 0.0;
};

// Checks every constraint family against the solution's inner products:
// pins, same-union consistency, linear rows, and entrywise nonnegativity
// (moment kinds only).  Empty result iff everything is within tol.
std::vector<Violation> verify_solution(const SosRelaxation& rel, const SosSolution& sol,
                                       double tol);

// Lovasz theta of g: builds the theta relaxation and solves it.
double lovasz_theta(const inst::Graph& g, double tol = 1e-7, bool dual = false);

// --- serialization ---------------------------------------------------------

std::string relaxation_to_json(const SosRelaxation& rel);
SosRelaxation relaxation_from_json(const std::string& text);

std::string solution_to_json(const SosSolution& sol);
SosSolution solution_from_json(const std::string& text);

}  // namespace soslab::relax
