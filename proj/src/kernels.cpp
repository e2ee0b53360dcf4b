#include "soslab/kernels.hpp"

#include <atomic>
#include <cfloat>
#include <cmath>

#include "soslab/common.hpp"

namespace soslab::kernels {

namespace {
std::atomic<Mode> g_mode{Mode::omp};
inline bool par() { return g_mode.load(std::memory_order_relaxed) == Mode::omp; }
}  // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }
void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

// Householder reduction, EISPACK tred2 lineage.  The two O(n^2) inner phases
// per step (p = A u / h, then the symmetric rank-2 update) run over
// independent rows, parallelized with identical per-row arithmetic.
void tridiagonalize(std::vector<double>& z, int n, std::vector<double>& d,
                    std::vector<double>& e, bool accumulate) {
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 1) { d[0] = z[0]; if (accumulate) z[0] = 1.0; return; }

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        double* zi = &z[static_cast<std::size_t>(i) * n];
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(zi[k]);
            if (scale == 0.0) {
                e[i] = zi[l];
            } else {
                for (int k = 0; k <= l; ++k) { zi[k] /= scale; h += zi[k] * zi[k]; }
                double f = zi[l];
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                zi[l] = f - g;
                // p = A u / h
#pragma omp parallel for schedule(static) if (par())
                for (int j = 0; j <= l; ++j) {
                    if (accumulate) z[static_cast<std::size_t>(j) * n + i] = zi[j] / h;
                    double gj = 0.0;
                    const double* zj = &z[static_cast<std::size_t>(j) * n];
                    for (int k = 0; k <= j; ++k) gj += zj[k] * zi[k];
                    for (int k = j + 1; k <= l; ++k) gj += z[static_cast<std::size_t>(k) * n + j] * zi[k];
                    e[j] = gj / h;
                }
                f = 0.0;
                for (int j = 0; j <= l; ++j) f += e[j] * zi[j];
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) e[j] -= hh * zi[j];
                // A -= u q^T + q u^T (lower triangle)
#pragma omp parallel for schedule(static) if (par())
                for (int j = 0; j <= l; ++j) {
                    const double fj = zi[j];
                    const double gj = e[j];
                    double* zj = &z[static_cast<std::size_t>(j) * n];
                    for (int k = 0; k <= j; ++k) zj[k] -= fj * e[k] + gj * zi[k];
                }
            }
        } else {
            e[i] = zi[l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;

    if (accumulate) {
        for (int i = 0; i < n; ++i) {
            const int l = i - 1;
            if (d[i] != 0.0) {
#pragma omp parallel for schedule(static) if (par())
                for (int j = 0; j <= l; ++j) {
                    double g = 0.0;
                    const double* zi = &z[static_cast<std::size_t>(i) * n];
                    for (int k = 0; k <= l; ++k) g += zi[k] * z[static_cast<std::size_t>(k) * n + j];
                    for (int k = 0; k <= l; ++k) z[static_cast<std::size_t>(k) * n + j] -= g * z[static_cast<std::size_t>(k) * n + i];
                }
            }
            d[i] = z[static_cast<std::size_t>(i) * n + i];
            z[static_cast<std::size_t>(i) * n + i] = 1.0;
            for (int j = 0; j <= l; ++j) {
                z[static_cast<std::size_t>(j) * n + i] = 0.0;
                z[static_cast<std::size_t>(i) * n + j] = 0.0;
            }
        }
    } else {
        for (int i = 0; i < n; ++i) d[i] = z[static_cast<std::size_t>(i) * n + i];
    }
}

namespace {
struct Rot { int i; double s, c; };
}

void tql_implicit(std::vector<double>& d, std::vector<double>& e,
                  std::vector<double>& z, int n, bool accumulate) {
    if (n == 1) return;
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    std::vector<Rot> rot;
    rot.reserve(n);

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= DBL_EPSILON * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw SolverError("tql_implicit: too many QL iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool broke = false;
                rot.clear();
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) { d[i + 1] -= p; e[m] = 0.0; broke = true; break; }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    rot.push_back({i, s, c});
                }
                if (accumulate && !rot.empty()) {
                    // one pass over rows; each row replays the rotation
                    // sequence in emission order
#pragma omp parallel for schedule(static) if (par())
                    for (int k = 0; k < n; ++k) {
                        double* zk = &z[static_cast<std::size_t>(k) * n];
                        for (const Rot& rr : rot) {
                            const double f = zk[rr.i + 1];
                            zk[rr.i + 1] = rr.s * zk[rr.i] + rr.c * f;
                            zk[rr.i] = rr.c * zk[rr.i] - rr.s * f;
                        }
                    }
                }
                if (broke) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void sym_times_cols(const std::vector<double>& b, int n,
                    const std::vector<double>& q, int k, std::vector<double>& c) {
    c.assign(static_cast<std::size_t>(n) * k, 0.0);
#pragma omp parallel for schedule(static) if (par())
    for (int i = 0; i < n; ++i) {
        double* ci = &c[static_cast<std::size_t>(i) * k];
        const double* bi = &b[static_cast<std::size_t>(i) * n];
        for (int j = 0; j < n; ++j) {
            const double bij = bi[j];
            const double* qj = &q[static_cast<std::size_t>(j) * k];
            for (int cc = 0; cc < k; ++cc) ci[cc] += bij * qj[cc];
        }
    }
}

void rank_k_update(std::vector<double>& p, int n, const std::vector<double>& q,
                   int k, const std::vector<double>& w, const std::vector<int>& cols,
                   double sign) {
#pragma omp parallel for schedule(static) if (par())
    for (int i = 0; i < n; ++i) {
        double* pi = &p[static_cast<std::size_t>(i) * n];
        const double* qi = &q[static_cast<std::size_t>(i) * k];
        for (int j = 0; j < n; ++j) {
            const double* qj = &q[static_cast<std::size_t>(j) * k];
            double acc = 0.0;
            for (int c : cols) acc += qi[c] * w[c] * qj[c];
            pi[j] += sign * acc;
        }
    }
}

void class_gather(const std::vector<double>& x, int /*n*/,
                  const std::vector<std::size_t>& offsets,
                  const std::vector<std::size_t>& entries,
                  const std::vector<double>& weights,
                  std::vector<double>& sums) {
    const int nc = static_cast<int>(offsets.size()) - 1;
    sums.assign(nc, 0.0);
#pragma omp parallel for schedule(static) if (par())
    for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (std::size_t t = offsets[c]; t < offsets[c + 1]; ++t)
            acc += weights[t] * x[entries[t]];
        sums[c] = acc;
    }
}

void class_scatter(const std::vector<double>& y, int n,
                   const std::vector<int>& entry_class,
                   const std::vector<double>& pin_values,
                   std::vector<double>& x) {
#pragma omp parallel for schedule(static) if (par())
    for (int i = 0; i < n; ++i) {
        std::size_t p = static_cast<std::size_t>(i) * (i + 1) / 2;
        for (int j = 0; j <= i; ++j, ++p) {
            const int c = entry_class[p];
            const double v = (c >= 0) ? y[c] : pin_values[-c - 1];
            x[static_cast<std::size_t>(i) * n + j] = v;
            x[static_cast<std::size_t>(j) * n + i] = v;
        }
    }
}

}  // namespace soslab::kernels
