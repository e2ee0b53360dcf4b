#pragma once

// The integrality-gap reductions: CSP -> densest k-subgraph on the label
// extended factor graph, graph -> hypergraph powering, and CSP -> SSBVE via
// edge subdivision, each with the explicit SoS-solution mapping that
// transports a complete source solution to a feasible target solution.  Plus
// brute-force optimum oracles for gap reports.
//
// The paper-scale parameter formulas (Delta = 100q^{D+rho}/K and friends) are
// astronomically large at any runnable size; here Delta is a small
// user-supplied density and defaults to ceil(m/n).  Note the mapped DkS
// solution satisfies the k = 2m cardinality rows exactly when n*Delta = m
// (the construction counts m left contributions and n*Delta right ones), so
// feasibility tests want instances with m divisible by n; the value and the
// SSBVE mapping need only source completeness.

#include <optional>
#include <utility>
#include <vector>

#include "soslab/instances.hpp"
#include "soslab/relaxations.hpp"

namespace soslab::reduce {

// Densest k-subgraph instance on H_{I,delta}.  The flattened graph puts the
// left block (constraint, satisfying assignment) at indices [0, |L|) and the
// right block (variable, letter, copy) at [|L|, |L|+|R|).
struct DksReduction {
    inst::CspInstance source;
    inst::BipartiteGraph bip;
    inst::Graph graph;
    int delta = 0;
    int k = 0;  // = 2m
};

// SSBVE instance: the subdivision of H_{I,delta}.  Left side = edges of the
// flattened graph (in its sorted edge order), right side = its vertices,
// l = delta*m*K.
struct SsbveReduction {
    inst::CspInstance source;
    inst::Graph base;  // the flattened H_{I,delta} that was subdivided
    inst::BipartiteGraph bip;
    int delta = 0;
    int l = 0;  // = delta*m*K
};

// Lemma-style mapping: with a labeled source solution at level r, returns the
// plain solution V_S = W_{(T,beta)} (zero on inconsistent S) at level
// target_level (default floor(r/K)).  Passing target_level below the default
// trims the enumerated key sizes; above it is an error, as is floor(r/K) < 1.
std::pair<DksReduction, std::optional<relax::SosSolution>> csp_to_dks(
    const inst::CspInstance& src, const std::optional<relax::SosSolution>& sol = {},
    int delta = 0, int target_level = 0);

// Hypergraph powering: edges = all unions of rho = 2^{t-1} edges of g,
// deduplicated; arity <= 2^t.
inst::Hypergraph dks_to_dksh(const inst::Graph& g, int t);

// lhs = sum over ordered 2^p-tuples (f_1..f_{2^p}) of edges of
// ||V_{f_1 u ... u f_{2^p}}||^2; rhs = FRAC^{2^p} with FRAC = sum ||V_f||^2.
// On a feasible solution lhs >= rhs up to solver error; p = 0 gives
// lhs == rhs exactly (same accumulation).
std::pair<double, double> hyper_tuple_bound(const relax::SosSolution& sol,
                                            const std::vector<std::pair<int, int>>& edges,
                                            int p);

// With the Lemma-mapped DkS solution at level r' (and optionally the labeled
// source solution, cross-checked for pairing), returns U_S = V_{B(S)} at
// level r'/2 - 4, B(S) = (R cap S) u N(L cap S).
std::pair<SsbveReduction, std::optional<relax::SosSolution>> csp_to_ssbve(
    const inst::CspInstance& src, const std::optional<relax::SosSolution>& dks_sol = {},
    const std::optional<relax::SosSolution>& source_sol = {}, int delta = 0);

// Exact integer optima by budgeted exhaustive enumeration.  param carries the
// cardinality (k for clique-family kinds, l for ssbve); kinds that need none
// ignore it.
long long brute_force_opt(relax::Kind kind, const inst::Graph& g, int param = 0);
long long brute_force_opt(relax::Kind kind, const inst::Hypergraph& h, int param);
long long brute_force_opt(relax::Kind kind, const inst::BipartiteGraph& b, int param);
long long brute_force_opt(const inst::CspInstance& c);

}  // namespace soslab::reduce
