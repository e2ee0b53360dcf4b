#pragma once

// Pseudoexpectation operators: both directions of the vectors <->
// pseudoexpectation equivalence, feasibility reporting, and pseudocalibrated
// operators for planted clique and boolean Max K-CSP.
//
// Conventions.  Moments are stored per monomial key (sorted subset of [n]);
// x_i^2 = x_i is built into that representation, so the scaling constraints
// of the hierarchy cannot even be written down wrong here.  Pseudocalibrated
// coefficients are exact rationals (mpq) end to end; floats only appear when
// a moment matrix is assembled.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "soslab/common.hpp"
#include "soslab/instances.hpp"
#include "soslab/linalg.hpp"
#include "soslab/poly.hpp"
#include "soslab/relaxations.hpp"

namespace soslab::pe {

// Fourier index over graph edges: unordered pairs u < v, strictly increasing.
struct EdgeSet {
    std::vector<std::pair<int, int>> edges;

    void validate(int n) const;
    Key vertex_support() const;
};

struct Pseudoexpectation {
    int n = 0;
    int degree = 0;  // moments stored for every |S| <= degree
    std::map<Key, double> values;
    std::map<Key, poly::Rational> exact;  // populated by exact-mode pcal only

    // Stored moment, throwing on a miss (never synthesizes zeros: a missing
    // moment is a caller bug, not a zero).
    double at(const Key& k) const;
};

// --- the equivalence --------------------------------------------------------

// E[x_S] = <V_phi, V_S> for every stored key.  The solution must be a plain
// (unlabeled) one containing phi.
Pseudoexpectation vectors_to_pe(const relax::SosSolution& sol);

// Gram-factorizes the level-r moment matrix.  Needs every moment up to
// degree 2r; rejects matrices with an eigenvalue below -tol, clips the
// rounding dust above it.
relax::SosSolution pe_to_vectors(const Pseudoexpectation& p, int r, double tol);

// M_{S,T} = E[x_{S u T}] over [n]_{<= r} in size-then-lex key order.
la::SymMatrix moment_matrix(const Pseudoexpectation& p, int r);

struct PeReport {
    double one_violation = 0.0;         // |E[1] - 1|
    double constraint_violation = 0.0;  // max_i,S |E[q_i x_S]|
    std::string worst_constraint;       // which (i, S) attained it
    double min_eigenvalue = 0.0;        // of the degree floor(degree/2) moment matrix
    bool passes = false;                // all of the above within tol
};

// Feasibility report against a boolean program whose constraint polynomials
// are read as identities q_i = 0 (the equality form of the hierarchy).
PeReport pe_check(const Pseudoexpectation& p, const relax::GenericProgram& prog, double tol);

// Linear-functional application, E[f] = sum_S f_S E[x_S].
double apply(const Pseudoexpectation& p, const poly::MultilinearPoly& f);
poly::Rational apply_exact(const Pseudoexpectation& p,
                           const std::map<Key, poly::Rational>& coeffs);

// --- pseudocalibration: planted clique --------------------------------------

// Fourier coefficient at |S u V(T)| = t: the probability that a uniform
// k-subset of [n] contains a fixed t-set.  Exact mode is the binomial ratio
// C(n-t, k-t) / C(n, k); approximate mode is (k/n)^t.  Both are 0 when t > k.
poly::Rational pcal_clique_coeff(long n, long k, long t, bool exact);

// Truncated pseudocalibrated operator: for every S in [n]_{<= 2r},
// E[x_S] = sum over edge sets T with |S u V(T)| <= tau of coeff * chi_T(G).
Pseudoexpectation pcal_clique_pe(const inst::Graph& g, int k, int r, int tau, bool exact);

// Literal planted-distribution expectation E[x_S(x) chi_T(G)], by enumerating
// every k-subset placement (edges outside the clique average to zero).
poly::Rational pcal_clique_oracle(int n, int k, const Key& s, const EdgeSet& t);

// --- pseudocalibration: boolean Max K-CSP -----------------------------------

// Fourier coefficient of E[x_S] at T, a set of (constraint, position) pairs,
// for a q = 2 instance read over the +-1 alphabet.  Structural path: zero
// unless S is exactly the odd-degree variable set of H_T, else the product
// over touched constraints of the code's character sum.  The brute-force
// twin enumerates the planted distribution literally.
poly::Rational pcal_csp_coeff(const inst::CspInstance& c, const Key& s,
                              const std::vector<std::pair<int, int>>& t);
poly::Rational pcal_csp_coeff_brute(const inst::CspInstance& c, const Key& s,
                                    const std::vector<std::pair<int, int>>& t);

// --- serialization ----------------------------------------------------------
// {"n":..,"degree":..,"values":{"[]":1.0,...}}; exact operators store values
// as "p/q" strings instead.  Compact, trailing newline.

std::string pe_to_json(const Pseudoexpectation& p);
Pseudoexpectation pe_from_json(const std::string& text);

}  // namespace soslab::pe
