#include "soslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soslab/kernels.hpp"

namespace soslab::la {

SymMatrix::SymMatrix(int d) : dim(d) {
    if (d < 0 || d > kMaxDim)
        throw ValidationError("SymMatrix: dimension out of range [0," + std::to_string(kMaxDim) + "]");
    a.assign(static_cast<std::size_t>(d) * d, 0.0);
}

std::vector<double> SymMatrix::lower() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(dim) * (dim + 1) / 2);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) out.push_back(at(i, j));
    return out;
}

SymMatrix SymMatrix::from_lower(int dim, const std::vector<double>& lower) {
    if (lower.size() != static_cast<std::size_t>(dim) * (dim + 1) / 2)
        throw ValidationError("from_lower: wrong element count");
    SymMatrix m(dim);
    std::size_t p = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) m.set(i, j, lower[p++]);
    return m;
}

double SymMatrix::frob_dist2(const SymMatrix& o) const {
    if (dim != o.dim) throw ValidationError("frob_dist2: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - o.a[i];
        s += d * d;
    }
    return s;
}

namespace {

// Sort eigenvalues ascending and normalize each eigenvector's sign so that
// its largest-magnitude component is positive (first index wins ties).
void sort_and_normalize(EigResult& r, bool want_vectors) {
    const int n = r.dim;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int x, int y) { return r.values[x] < r.values[y]; });
    std::vector<double> vals(n);
    for (int c = 0; c < n; ++c) vals[c] = r.values[perm[c]];
    r.values = std::move(vals);
    if (!want_vectors) return;
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
        const int src = perm[c];
        int arg = 0;
        double best = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = std::fabs(r.vectors[static_cast<std::size_t>(i) * n + src]);
            if (x > best) { best = x; arg = i; }
        }
        const double sgn = (r.vectors[static_cast<std::size_t>(arg) * n + src] < 0.0) ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i) * n + c] = sgn * r.vectors[static_cast<std::size_t>(i) * n + src];
    }
    r.vectors = std::move(v);
}

}  // namespace

EigResult sym_eig(const SymMatrix& m, bool want_vectors) {
    EigResult r;
    r.dim = m.dim;
    if (m.dim == 0) return r;
    std::vector<double> z = m.a;
    std::vector<double> d, e;
    kernels::tridiagonalize(z, m.dim, d, e, want_vectors);
    kernels::tql_implicit(d, e, z, m.dim, want_vectors);
    r.values = std::move(d);
    if (want_vectors) r.vectors = std::move(z);
    sort_and_normalize(r, want_vectors);
    return r;
}

std::vector<double> sym_eigvals(const SymMatrix& m) { return sym_eig(m, false).values; }

SymMatrix psd_clip(const SymMatrix& m, double* min_eig) {
    EigResult r = sym_eig(m, true);
    if (min_eig) *min_eig = r.values.empty() ? 0.0 : r.values.front();
    const int n = m.dim;
    std::vector<int> pos, neg;
    for (int c = 0; c < n; ++c) (r.values[c] > 0.0 ? pos : neg).push_back(c);
    SymMatrix out(n);
    // reconstruct from whichever side has fewer terms
    if (pos.size() <= neg.size()) {
        kernels::rank_k_update(out.a, n, r.vectors, n, r.values, pos, 1.0);
    } else {
        out.a = m.a;
        kernels::rank_k_update(out.a, n, r.vectors, n, r.values, neg, -1.0);
    }
    // exact symmetry regardless of float noise in the update
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            double v = 0.5 * (out.at(i, j) + out.at(j, i));
            out.set(i, j, v);
        }
    return out;
}

std::vector<std::vector<double>> gram_vectors(const SymMatrix& m, double tol) {
    EigResult r = sym_eig(m, true);
    const int n = m.dim;
    if (n > 0 && r.values.front() < -tol)
        throw SolverError("gram_vectors: matrix not PSD within tolerance (min eig " +
                          std::to_string(r.values.front()) + ")");
    // numerical-rank cutoff: tiny positive eigenvalues are factorization noise
    const double cut = (n > 0 && r.values.back() > 0.0) ? r.values.back() * 1e-12 : 0.0;
    std::vector<int> keep;
    for (int c = 0; c < n; ++c)
        if (r.values[c] > cut) keep.push_back(c);
    std::vector<std::vector<double>> vecs(n);
    for (int i = 0; i < n; ++i) {
        vecs[i].resize(keep.size());
        for (std::size_t t = 0; t < keep.size(); ++t)
            vecs[i][t] = r.vec(i, keep[t]) * std::sqrt(r.values[keep[t]]);
    }
    return vecs;
}

double projection_residual(const std::vector<std::vector<double>>& cols,
                           const std::vector<int>& chosen) {
    if (cols.empty()) return 0.0;
    const std::size_t d = cols[0].size();
    for (const auto& c : cols)
        if (c.size() != d) throw ValidationError("projection_residual: ragged columns");
    // orthonormal basis of the chosen span via modified Gram-Schmidt with one
    // reorthogonalization pass
    std::vector<std::vector<double>> basis;
    for (int idx : chosen) {
        if (idx < 0 || idx >= static_cast<int>(cols.size()))
            throw ValidationError("projection_residual: chosen index out of range");
        std::vector<double> v = cols[idx];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                double c = dot(b, v);
                for (std::size_t t = 0; t < d; ++t) v[t] -= c * b[t];
            }
        double nn = std::sqrt(norm2(v));
        if (nn > 1e-12) {
            for (auto& x : v) x /= nn;
            basis.push_back(std::move(v));
        }
    }
    double res = 0.0;
    for (const auto& col : cols) {
        double full = norm2(col);
        double proj = 0.0;
        for (const auto& b : basis) {
            double c = dot(b, col);
            proj += c * c;
        }
        res += std::max(0.0, full - proj);
    }
    return res;
}

double hw_pairing_bound(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim != b.dim) throw ValidationError("hw_pairing_bound: dimension mismatch");
    std::vector<double> la = sym_eigvals(a);
    std::vector<double> lb = sym_eigvals(b);
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        double d = la[i] - lb[i];
        s += d * d;
    }
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

}  // namespace soslab::la
