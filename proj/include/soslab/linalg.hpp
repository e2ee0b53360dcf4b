#pragma once

// Dense symmetric matrices and the hand-rolled eigensolver.
//
// Everything here is deterministic: eigenvalues come back ascending and each
// eigenvector's sign is normalized (largest-magnitude component positive), so
// repeated runs produce identical bytes.  The O(n^3) kernels exist in a
// serial reference version and an OpenMP version that share the exact same
// per-element arithmetic order; see kernels.hpp.

#include <string>
#include <vector>

#include "soslab/common.hpp"

namespace soslab::la {

constexpr int kMaxDim = 2000;  // guard against accidental huge problems

// Symmetric matrix, full row-major storage (kept symmetric by the setters).
struct SymMatrix {
    int dim = 0;
    std::vector<double> a;  // dim*dim

    SymMatrix() = default;
    explicit SymMatrix(int d);

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }
    void set(int i, int j, double v) {
        a[static_cast<std::size_t>(i) * dim + j] = v;
        a[static_cast<std::size_t>(j) * dim + i] = v;
    }
    void add(int i, int j, double v) {
        a[static_cast<std::size_t>(i) * dim + j] += v;
        if (i != j) a[static_cast<std::size_t>(j) * dim + i] += v;
    }

    // Dense lower triangle, row-major: a00, a10, a11, a20, ...
    std::vector<double> lower() const;
    static SymMatrix from_lower(int dim, const std::vector<double>& lower);

    double frob_dist2(const SymMatrix& o) const;
};

struct EigResult {
    std::vector<double> values;  // ascending
    std::vector<double> vectors; // row-major dim x dim, column c = eigenvector c
    int dim = 0;

    double vec(int i, int c) const { return vectors[static_cast<std::size_t>(i) * dim + c]; }
};

// Full symmetric eigendecomposition (Householder tridiagonalization followed
// by implicit-shift QL).  Throws SolverError if QL fails to converge.
EigResult sym_eig(const SymMatrix& m, bool want_vectors = true);

// Eigenvalues only (skips accumulation work).
std::vector<double> sym_eigvals(const SymMatrix& m);

// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
SymMatrix psd_clip(const SymMatrix& m, double* min_eig = nullptr);

// Gram factorization: rows of the result are vectors v_i with <v_i,v_j> =
// m_ij.  Columns with eigenvalue <= 0 are dropped, so the embedding dimension
// equals the numerical rank.  Rejects matrices with an eigenvalue below -tol.
std::vector<std::vector<double>> gram_vectors(const SymMatrix& m, double tol);

// Exact squared residual of projecting every column onto the span of the
// chosen columns.  `cols` is a list of length-d vectors.
double projection_residual(const std::vector<std::vector<double>>& cols,
                           const std::vector<int>& chosen);

// Hoffman-Wielandt pairing bound: minimal sum of squared eigenvalue
// differences over pairings, realized by sorting both spectra ascending.
double hw_pairing_bound(const SymMatrix& a, const SymMatrix& b);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);  // squared norm

}  // namespace soslab::la
