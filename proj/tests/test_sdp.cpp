#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soslab/linalg.hpp"
#include "soslab/rng.hpp"
#include "soslab/sdp.hpp"

using namespace soslab;
using namespace soslab::sdp;
using la::SymMatrix;

TEST_CASE("max off-diagonal with pinned unit diagonal") {
    // X = [[1, y], [y, 1]] psd iff |y| <= 1; maximize 2y -> 2
    SdpProblem p;
    p.dim = 2;
    p.sense = Sense::maximize;
    p.entry_class = {-1, 0, -1};  // both diagonal entries pinned to 1
    p.pin_values = {1.0};
    p.n_free = 1;
    p.objective = {2.0};
    auto s = solve_sdp(p, 1e-8, 20000);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(s.matrix.at(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(s.psd_violation < 1e-7);
}

TEST_CASE("trace-one moment problem") {
    // maximize X01 s.t. X00 + X11 = 1: optimum 1/2 at X00 = X11 = 1/2
    SdpProblem p = SdpProblem::dense(2, Sense::maximize);
    SymMatrix c(2);
    c.set(0, 1, 0.5);
    p.set_objective_matrix(c);
    SymMatrix tr(2);
    tr.set(0, 0, 1.0);
    tr.set(1, 1, 1.0);
    p.add_eq(tr, 1.0);
    auto s = solve_sdp(p, 1e-8, 20000);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(s.matrix.at(0, 0) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(s.primal_residual < 1e-8);
}

TEST_CASE("forced-equal classes act as consistency constraints") {
    // X00 and X11 share a class; trace row makes them 1/2 each
    SdpProblem p;
    p.dim = 2;
    p.sense = Sense::maximize;
    p.entry_class = {0, 1, 0};
    p.n_free = 2;
    p.objective = {0.0, 2.0};  // 2*X01
    Row tr;
    tr.terms = {{0, 2.0}};
    tr.rhs = 1.0;
    p.add_eq_row(tr);
    auto s = solve_sdp(p, 1e-8, 20000);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(s.matrix.at(0, 0) == s.matrix.at(1, 1));
}

TEST_CASE("minimize with a ge bound") {
    SdpProblem p = SdpProblem::dense(1, Sense::minimize);
    SymMatrix c(1);
    c.set(0, 0, 1.0);
    p.set_objective_matrix(c);
    p.add_ineq(c, 2.0, Rel::ge);
    auto s = solve_sdp(p, 1e-8, 20000);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("inequality in the binding-le direction") {
    SdpProblem p = SdpProblem::dense(1, Sense::maximize);
    SymMatrix c(1);
    c.set(0, 0, 1.0);
    p.set_objective_matrix(c);
    p.add_ineq(c, 1.5, Rel::le);
    auto s = solve_sdp(p, 1e-8, 20000);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(1.5).epsilon(1e-5));
}

TEST_CASE("largest eigenvalue as an SDP, warm projector path") {
    // max C.X s.t. tr X = 1, X psd  ==  lambda_max(C).  The near-degenerate
    // top of a random spectrum is close to worst case for a first-order
    // solver, so the tolerances here are loose; what matters is that the
    // low-rank projection path gives the same answer as the full one.
    const int n = 120;
    Rng rng(314);
    SymMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) c.set(i, j, rng.gaussian() / std::sqrt(n));
    double expect = la::sym_eigvals(c).back();

    SdpProblem p = SdpProblem::dense(n, Sense::maximize);
    p.set_objective_matrix(c);
    SymMatrix tr(n);
    for (int i = 0; i < n; ++i) tr.set(i, i, 1.0);
    p.add_eq(tr, 1.0);
    SolveOptions warm;
    warm.lowrank_min_dim = 100;  // n is above it: exercises subspace tracking
    auto s = solve_sdp(p, 2e-5, 12000, warm);
    CHECK(s.value == doctest::Approx(expect).epsilon(3e-3));
    CHECK(s.psd_violation < 1e-6);
    CHECK(s.primal_residual < 1e-7);

    SolveOptions full;
    full.lowrank_min_dim = la::kMaxDim + 1;  // never engage the warm path
    auto sf = solve_sdp(p, 2e-5, 12000, full);
    // the tracked projection deviates from the exact one by ~1e-8 a step, so
    // the two paths land on the same answer without being bitwise twins
    CHECK(sf.value == doctest::Approx(s.value).epsilon(1e-4));
    CHECK(sf.psd_violation < 1e-6);
}

TEST_CASE("lovasz theta of the 5-cycle") {
    // max J.Y, tr Y = 1, Y_ij = 0 on edges; optimum sqrt(5)
    const int n = 5;
    SdpProblem p;
    p.dim = n;
    p.sense = Sense::maximize;
    const std::size_t ne = n * (n + 1) / 2;
    p.entry_class.assign(ne, 0);
    int cls = 0;
    std::size_t q = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j, ++q) {
            bool edge = (i - j == 1) || (i == 4 && j == 0);
            p.entry_class[q] = edge ? -1 : cls++;
        }
    p.pin_values = {0.0};
    p.n_free = cls;
    p.objective.assign(cls, 0.0);
    SymMatrix ones(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) ones.set(i, j, 1.0);
    p.set_objective_matrix(ones);
    SymMatrix tr(n);
    for (int i = 0; i < n; ++i) tr.set(i, i, 1.0);
    p.add_eq(tr, 1.0);
    auto s = solve_sdp(p, 1e-9, 50000);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-5));
}

TEST_CASE("validation rejects malformed problems") {
    SdpProblem p = SdpProblem::dense(2, Sense::maximize);
    p.entry_class[0] = 99;  // out of range
    CHECK_THROWS_AS(p.validate(), ValidationError);

    SdpProblem q = SdpProblem::dense(2, Sense::maximize);
    Row r;
    r.rhs = 1.0;  // 0 = 1
    CHECK_THROWS_AS(q.add_eq_row(r), ValidationError);

    SdpProblem z = SdpProblem::dense(2, Sense::maximize);
    Row rr;
    rr.terms = {{0, 1.0}, {0, -1.0}};  // cancels to 0 = 1
    rr.rhs = 1.0;
    CHECK_THROWS_AS(z.add_eq_row(rr), ValidationError);
}

TEST_CASE("pinned entries survive into the solution") {
    SdpProblem p;
    p.dim = 3;
    p.sense = Sense::maximize;
    p.entry_class = {-1, 0, 1, 2, -2, 3};
    p.pin_values = {1.0, 0.25};
    p.n_free = 4;
    p.objective = {2.0, 0.0, 0.0, 0.0};
    Row cap;
    cap.terms = {{0, 1.0}};
    cap.rhs = 0.125;
    p.add_ineq_row(cap, Rel::le);
    auto s = solve_sdp(p, 1e-8, 20000);
    CHECK(s.converged);
    CHECK(s.matrix.at(0, 0) == 1.0);
    CHECK(s.matrix.at(2, 1) == 0.25);
    CHECK(s.matrix.at(1, 0) == doctest::Approx(0.125).epsilon(1e-5));
}
