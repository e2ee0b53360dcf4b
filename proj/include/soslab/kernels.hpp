#pragma once

// The O(n^2)/O(n^3) inner loops, each in two variants: a serial reference and
// an OpenMP one.  Both variants perform identical per-element arithmetic in
// identical order (parallelism only distributes independent rows/columns), so
// their outputs are required to be bitwise equal; the test suite asserts this
// and the bench target times them against each other.

#include <cstddef>
#include <vector>

namespace soslab::kernels {

enum class Mode { serial, omp };

Mode mode();
void set_mode(Mode m);

// Householder tridiagonalization with transform accumulation.
// In/out: z = n*n row-major (input symmetric matrix, output orthogonal Q).
// Out: d = diagonal, e = subdiagonal (e[0] unused).
void tridiagonalize(std::vector<double>& z, int n, std::vector<double>& d,
                    std::vector<double>& e, bool accumulate);

// Implicit-shift QL on a tridiagonal (d,e), rotations applied to the columns
// of z when accumulate is set.  Eigenvalues come back unsorted in d.
void tql_implicit(std::vector<double>& d, std::vector<double>& e,
                  std::vector<double>& z, int n, bool accumulate);

// C (n x k) = B (n x n symmetric, full storage) * Q (n x k), all row-major.
void sym_times_cols(const std::vector<double>& b, int n,
                    const std::vector<double>& q, int k, std::vector<double>& c);

// P (n x n) += sign * Q diag(w) Q^T restricted to the given columns of Q.
void rank_k_update(std::vector<double>& p, int n, const std::vector<double>& q,
                   int k, const std::vector<double>& w, const std::vector<int>& cols,
                   double sign);

// Class-structured gather/scatter over an n x n symmetric matrix.
// `offsets`/`entries` form a CSR layout: class c owns
// entries[offsets[c]..offsets[c+1]) as flat indices into the caller's
// buffer, and `weights` carries the symmetric multiplicity (1 diagonal,
// 2 off-diagonal).
void class_gather(const std::vector<double>& x, int n,
                  const std::vector<std::size_t>& offsets,
                  const std::vector<std::size_t>& entries,
                  const std::vector<double>& weights,
                  std::vector<double>& sums);

void class_scatter(const std::vector<double>& y, int n,
                   const std::vector<int>& entry_class,
                   const std::vector<double>& pin_values,
                   std::vector<double>& x);

}  // namespace soslab::kernels
