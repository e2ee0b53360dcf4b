#pragma once

// First-order SDP solver.
//
// Problems are stored in "entry class" form: every entry of the symmetric
// matrix variable belongs to exactly one class, all entries of a class are
// forced equal (this is how moment-matrix consistency is encoded without
// emitting quadratically many rows), and a class can be pinned to a constant.
// Linear equality/inequality rows then act on the class values.  A plain
// dense SDP is the special case where every entry is its own class.
//
// The solve is operator splitting (ADMM): alternate projection onto the
// affine set (classes + rows, a weighted least-squares with a factorization
// computed once) and onto the PSD cone x nonnegative slacks, with
// over-relaxation, optional adaptive penalty, and safeguarded Anderson
// acceleration of the splitting fixed point, followed by an alternating
// projection polish that drives the returned matrix to feasibility.  For
// large dimensions the PSD projection tracks the positive eigenspace with a
// warm-started subspace iteration, verified by residual and leakage checks
// and refreshed periodically by a full decomposition.

#include <vector>

#include "soslab/linalg.hpp"

namespace soslab::sdp {

using la::SymMatrix;

enum class Sense { maximize, minimize };
enum class Rel { le, ge };

struct Term {
    int cls;
    double coef;
};

// Sparse linear functional over class values.
struct Row {
    std::vector<Term> terms;
    double rhs = 0.0;
};

struct SdpProblem {
    int dim = 0;
    Sense sense = Sense::maximize;

    // Packed lower triangle (p = i*(i+1)/2 + j, j <= i).  Values >= 0 index a
    // free class; value -k-1 pins the entry to pin_values[k].
    std::vector<int> entry_class;
    std::vector<double> pin_values;
    int n_free = 0;

    // Objective in class space: value = sum_c objective[c]*y_c + objective_const.
    std::vector<double> objective;
    double objective_const = 0.0;

    std::vector<Row> eq_rows;
    std::vector<Row> ineq_rows;
    std::vector<Rel> ineq_rel;

    // Dense problem: every lower-triangle entry its own class.
    static SdpProblem dense(int dim, Sense sense);

    int class_of(int i, int j) const;

    // Dense-matrix interface (coefficients fold into class space; pinned
    // entries move to the right-hand side).
    void set_objective_matrix(const SymMatrix& c);
    void add_eq(const SymMatrix& a, double b);
    void add_ineq(const SymMatrix& a, double b, Rel rel);

    void add_eq_row(Row r);
    void add_ineq_row(Row r, Rel rel);

    void validate() const;

  private:
    Row matrix_to_row(const SymMatrix& a, double b) const;
};

struct SolveOptions {
    double rho = 1.0;
    double over_relax = 1.6;
    bool adaptive_rho = true;
    int aa_memory = 10;          // Anderson window on the splitting fixed point (0 = off)
    double polish_tol = 1e-8;    // target |min eigenvalue| of returned matrix
    int polish_max_iter = 300;
    int refresh_every = 40;      // full eigendecomposition cadence (warm path)
    int lowrank_min_dim = 180;   // subspace-tracking kicks in above this dim
    bool verbose = false;
};

struct SdpSolution {
    SymMatrix matrix;            // affine-side iterate: rows/pins hold exactly
    std::vector<double> y;       // class values of `matrix`
    double value = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;  // worst row violation of `matrix`
    double dual_residual = 0.0;
    double psd_violation = 0.0;    // max(0, -min_eig(matrix))
    bool converged = false;
};

SdpSolution solve_sdp(const SdpProblem& p, double tol = 1e-6, int max_iter = 50000,
                      const SolveOptions& opt = {});

}  // namespace soslab::sdp
