#include "soslab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <cstdio>

#include "soslab/kernels.hpp"

namespace soslab::sdp {

namespace {

double frob(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Dense Cholesky, lower triangle of m (row-major n x n).  Returns false if a
// pivot collapses.
bool cholesky(std::vector<double>& m, int n) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= m[static_cast<std::size_t>(i) * n + k] * m[static_cast<std::size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0.0) return false;
                m[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
            } else {
                m[static_cast<std::size_t>(i) * n + j] = s / m[static_cast<std::size_t>(j) * n + j];
            }
        }
    }
    return true;
}

void chol_solve(const std::vector<double>& l, int n, std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * n + k] * x[k];
        x[i] = s / l[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k) * n + i] * x[k];
        x[i] = s / l[static_cast<std::size_t>(i) * n + i];
    }
}

Row canonical_row(Row r) {
    std::map<int, double> acc;
    for (const Term& t : r.terms) acc[t.cls] += t.coef;
    Row out;
    out.rhs = r.rhs;
    for (const auto& [c, v] : acc)
        if (v != 0.0) out.terms.push_back({c, v});
    return out;
}

}  // namespace

SdpProblem SdpProblem::dense(int dim, Sense sense) {
    SdpProblem p;
    p.dim = dim;
    p.sense = sense;
    const std::size_t ne = static_cast<std::size_t>(dim) * (dim + 1) / 2;
    p.entry_class.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) p.entry_class[i] = static_cast<int>(i);
    p.n_free = static_cast<int>(ne);
    p.objective.assign(ne, 0.0);
    return p;
}

int SdpProblem::class_of(int i, int j) const {
    if (j > i) std::swap(i, j);
    return entry_class[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
}

Row SdpProblem::matrix_to_row(const SymMatrix& a, double b) const {
    if (a.dim != dim) throw ValidationError("constraint matrix dimension mismatch");
    Row r;
    r.rhs = b;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) {
            double c = a.at(i, j);
            if (c == 0.0) continue;
            double w = (i == j) ? 1.0 : 2.0;
            int cls = class_of(i, j);
            if (cls >= 0) r.terms.push_back({cls, w * c});
            else r.rhs -= w * c * pin_values[-cls - 1];
        }
    return canonical_row(std::move(r));
}

void SdpProblem::set_objective_matrix(const SymMatrix& c) {
    Row r = matrix_to_row(c, 0.0);
    objective.assign(n_free, 0.0);
    for (const Term& t : r.terms) objective[t.cls] += t.coef;
    objective_const = -r.rhs;  // pinned contribution moved back to the value
}

void SdpProblem::add_eq(const SymMatrix& a, double b) { add_eq_row(matrix_to_row(a, b)); }

void SdpProblem::add_ineq(const SymMatrix& a, double b, Rel rel) {
    add_ineq_row(matrix_to_row(a, b), rel);
}

void SdpProblem::add_eq_row(Row r) {
    r = canonical_row(std::move(r));
    if (r.terms.empty()) {
        if (std::fabs(r.rhs) > 1e-12)
            throw ValidationError("inconsistent constant equality row");
        return;
    }
    eq_rows.push_back(std::move(r));
}

void SdpProblem::add_ineq_row(Row r, Rel rel) {
    r = canonical_row(std::move(r));
    if (r.terms.empty()) {
        bool ok = (rel == Rel::le) ? (0.0 <= r.rhs + 1e-12) : (0.0 >= r.rhs - 1e-12);
        if (!ok) throw ValidationError("inconsistent constant inequality row");
        return;
    }
    ineq_rows.push_back(std::move(r));
    ineq_rel.push_back(rel);
}

void SdpProblem::validate() const {
    if (dim <= 0 || dim > la::kMaxDim) throw ValidationError("sdp: bad dimension");
    const std::size_t ne = static_cast<std::size_t>(dim) * (dim + 1) / 2;
    if (entry_class.size() != ne) throw ValidationError("sdp: entry_class size mismatch");
    std::vector<char> used(n_free, 0);
    for (int c : entry_class) {
        if (c >= n_free || (c < 0 && static_cast<std::size_t>(-c - 1) >= pin_values.size()))
            throw ValidationError("sdp: entry class out of range");
        if (c >= 0) used[c] = 1;
    }
    for (int c = 0; c < n_free; ++c)
        if (!used[c]) throw ValidationError("sdp: free class with no entries");
    if (objective.size() != static_cast<std::size_t>(n_free))
        throw ValidationError("sdp: objective size mismatch");
    if (ineq_rows.size() != ineq_rel.size()) throw ValidationError("sdp: ineq bookkeeping");
    auto check_rows = [&](const std::vector<Row>& rows) {
        for (const Row& r : rows)
            for (const Term& t : r.terms)
                if (t.cls < 0 || t.cls >= n_free)
                    throw ValidationError("sdp: row references bad class");
    };
    check_rows(eq_rows);
    check_rows(ineq_rows);
}

namespace {

// ---------------------------------------------------------------------------
// Affine-set projection.  Minimizes ||M(y) - W||_F^2 + ||s - t||^2 subject to
// the equality rows and the slacked inequality rows; the normal-equation
// factorizations are computed once.
class AffineProjector {
  public:
    AffineProjector(const SdpProblem& p) : p_(p) {
        const int n = p.dim;
        const int nf = p.n_free;
        // class weights and gather lists
        w_.assign(nf, 0.0);
        std::vector<std::vector<std::pair<std::size_t, double>>> lists(nf);
        std::size_t pk = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j, ++pk) {
                int c = p.entry_class[pk];
                double wt = (i == j) ? 1.0 : 2.0;
                if (c >= 0) {
                    w_[c] += wt;
                    lists[c].push_back({static_cast<std::size_t>(i) * n + j, wt});
                }
            }
        offsets_.assign(nf + 1, 0);
        for (int c = 0; c < nf; ++c) offsets_[c + 1] = offsets_[c] + lists[c].size();
        entries_.resize(offsets_[nf]);
        eweights_.resize(offsets_[nf]);
        for (int c = 0; c < nf; ++c)
            for (std::size_t t = 0; t < lists[c].size(); ++t) {
                entries_[offsets_[c] + t] = lists[c][t].first;
                eweights_[offsets_[c] + t] = lists[c][t].second;
            }

        // inequality sign and H = diag(w) + A_in^T A_in
        csign_.resize(p.ineq_rows.size());
        for (std::size_t r = 0; r < p.ineq_rows.size(); ++r)
            csign_[r] = (p.ineq_rel[r] == Rel::le) ? 1.0 : -1.0;
        bool singleton = true;
        for (const Row& r : p.ineq_rows)
            if (r.terms.size() > 1) { singleton = false; break; }
        h_diag_ = w_;
        if (singleton) {
            for (const Row& r : p.ineq_rows)
                if (!r.terms.empty())
                    h_diag_[r.terms[0].cls] += r.terms[0].coef * r.terms[0].coef;
            dense_h_ = false;
        } else {
            if (nf > 2500)
                throw SolverError("sdp: coupled inequality rows with too many classes");
            hmat_.assign(static_cast<std::size_t>(nf) * nf, 0.0);
            for (int c = 0; c < nf; ++c) hmat_[static_cast<std::size_t>(c) * nf + c] = w_[c];
            for (const Row& r : p.ineq_rows)
                for (const Term& a : r.terms)
                    for (const Term& b : r.terms)
                        hmat_[static_cast<std::size_t>(a.cls) * nf + b.cls] += a.coef * b.coef;
            if (!cholesky(hmat_, nf)) throw SolverError("sdp: H factorization failed");
            dense_h_ = true;
        }

        // Schur complement for the equality rows
        const int me = static_cast<int>(p.eq_rows.size());
        if (me > 4000) throw SolverError("sdp: too many equality rows");
        if (me > 0) {
            schur_.assign(static_cast<std::size_t>(me) * me, 0.0);
            std::vector<double> tmp(nf);
            for (int r = 0; r < me; ++r) {
                std::fill(tmp.begin(), tmp.end(), 0.0);
                for (const Term& t : p.eq_rows[r].terms) tmp[t.cls] = t.coef;
                hinv_inplace(tmp);
                for (int s = 0; s <= r; ++s) {
                    double acc = 0.0;
                    for (const Term& t : p.eq_rows[s].terms) acc += t.coef * tmp[t.cls];
                    schur_[static_cast<std::size_t>(r) * me + s] = acc;
                    schur_[static_cast<std::size_t>(s) * me + r] = acc;
                }
            }
            // factor with a tiny ridge retry so dependent-but-consistent row
            // sets still project
            std::vector<double> saved = schur_;
            double ridge = 0.0;
            for (int attempt = 0; attempt < 6; ++attempt) {
                if (cholesky(schur_, me)) { ridge_ = ridge; return; }
                schur_ = saved;
                double tr = 0.0;
                for (int i = 0; i < me; ++i) tr += saved[static_cast<std::size_t>(i) * me + i];
                ridge = (ridge == 0.0) ? 1e-12 * (tr / me + 1.0) : ridge * 100.0;
                for (int i = 0; i < me; ++i) schur_[static_cast<std::size_t>(i) * me + i] += ridge;
            }
            throw SolverError("sdp: equality system factorization failed");
        }
    }

    const std::vector<double>& weights() const { return w_; }

    void gather(const std::vector<double>& x, std::vector<double>& g) const {
        kernels::class_gather(x, p_.dim, offsets_, entries_, eweights_, g);
    }

    // r0: class-space target (gathered sums + objective drift); t: slack
    // targets.  Outputs class values y and affine-side slacks.
    void project(std::vector<double> r0, const std::vector<double>& t,
                 std::vector<double>& y, std::vector<double>& s_aff) const {
        const int nf = p_.n_free;
        const int me = static_cast<int>(p_.eq_rows.size());
        for (std::size_t r = 0; r < p_.ineq_rows.size(); ++r) {
            double beta = p_.ineq_rows[r].rhs - csign_[r] * t[r];
            for (const Term& tm : p_.ineq_rows[r].terms) r0[tm.cls] += tm.coef * beta;
        }
        y = r0;
        hinv_inplace(y);
        if (me > 0) {
            std::vector<double> lam(me);
            for (int r = 0; r < me; ++r) {
                double acc = -p_.eq_rows[r].rhs;
                for (const Term& tm : p_.eq_rows[r].terms) acc += tm.coef * y[tm.cls];
                lam[r] = acc;
            }
            chol_solve(schur_, me, lam);
            for (int r = 0; r < me; ++r)
                for (const Term& tm : p_.eq_rows[r].terms) r0[tm.cls] -= tm.coef * lam[r];
            y = r0;
            hinv_inplace(y);
        }
        s_aff.resize(p_.ineq_rows.size());
        for (std::size_t r = 0; r < p_.ineq_rows.size(); ++r) {
            double ay = 0.0;
            for (const Term& tm : p_.ineq_rows[r].terms) ay += tm.coef * y[tm.cls];
            s_aff[r] = csign_[r] * (p_.ineq_rows[r].rhs - ay);
        }
        (void)nf;
    }

    void scatter(const std::vector<double>& y, std::vector<double>& x) const {
        kernels::class_scatter(y, p_.dim, p_.entry_class, p_.pin_values, x);
    }

  private:
    void hinv_inplace(std::vector<double>& v) const {
        if (dense_h_) {
            chol_solve(hmat_, p_.n_free, v);
        } else {
            for (int c = 0; c < p_.n_free; ++c) v[c] /= h_diag_[c];
        }
    }

    const SdpProblem& p_;
    std::vector<double> w_;
    std::vector<std::size_t> offsets_, entries_;
    std::vector<double> eweights_;
    std::vector<double> csign_;
    std::vector<double> h_diag_, hmat_, schur_;
    bool dense_h_ = false;
    double ridge_ = 0.0;
};

// ---------------------------------------------------------------------------
// PSD cone projection with warm-started positive-subspace tracking.
class PsdProjector {
  public:
    PsdProjector(int n, const SolveOptions& opt) : n_(n), opt_(opt) {}

    int fulls = 0, warms = 0, fallbacks = 0;

    void project(const std::vector<double>& b, std::vector<double>& out, bool force_full) {
        if (force_full || n_ < opt_.lowrank_min_dim || !warm_ok_ ||
            since_full_ >= opt_.refresh_every) {
            full(b, out);
            return;
        }
        if (!warm(b, out)) {
            ++fallbacks;
            full(b, out);
        }
    }

    double last_min_eig = 0.0;

  private:
    void full(const std::vector<double>& b, std::vector<double>& out) {
        ++fulls;
        std::vector<double> z = b;
        std::vector<double> d, e;
        kernels::tridiagonalize(z, n_, d, e, true);
        kernels::tql_implicit(d, e, z, n_, true);
        last_min_eig = *std::min_element(d.begin(), d.end());
        std::vector<int> pos, neg;
        for (int c = 0; c < n_; ++c) {
            if (d[c] > 0.0) pos.push_back(c);
            else if (d[c] < 0.0) neg.push_back(c);
        }
        if (pos.size() <= neg.size()) {
            out.assign(static_cast<std::size_t>(n_) * n_, 0.0);
            kernels::rank_k_update(out, n_, z, n_, d, pos, 1.0);
        } else {
            out = b;
            kernels::rank_k_update(out, n_, z, n_, d, neg, -1.0);
        }
        // refresh the warm basis: positive columns plus a small buffer of the
        // least-negative ones
        std::vector<int> order(n_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return d[a] > d[c]; });
        int k = 0;
        while (k < n_ && d[order[k]] > 0.0) ++k;
        k = std::min(n_, k + 6);
        k_ = k;
        q_.assign(static_cast<std::size_t>(n_) * k_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (int c = 0; c < k_; ++c)
                q_[static_cast<std::size_t>(i) * k_ + c] = z[static_cast<std::size_t>(i) * n_ + order[c]];
        since_full_ = 0;
        warm_ok_ = (k_ > 0 && k_ <= n_ / 4);
    }

    // Modified Gram-Schmidt over columns (two passes); drops collapsed
    // columns.  Returns the surviving column count.
    int mgs(std::vector<double>& q, int k) const {
        int kept = 0;
        for (int c = 0; c < k; ++c) {
            // copy column c into position kept
            if (c != kept)
                for (int i = 0; i < n_; ++i)
                    q[static_cast<std::size_t>(i) * k + kept] = q[static_cast<std::size_t>(i) * k + c];
            for (int pass = 0; pass < 2; ++pass)
                for (int pc = 0; pc < kept; ++pc) {
                    double r = 0.0;
                    for (int i = 0; i < n_; ++i)
                        r += q[static_cast<std::size_t>(i) * k + pc] * q[static_cast<std::size_t>(i) * k + kept];
                    for (int i = 0; i < n_; ++i)
                        q[static_cast<std::size_t>(i) * k + kept] -= r * q[static_cast<std::size_t>(i) * k + pc];
                }
            double nn = 0.0;
            for (int i = 0; i < n_; ++i) {
                double v = q[static_cast<std::size_t>(i) * k + kept];
                nn += v * v;
            }
            nn = std::sqrt(nn);
            if (nn > 1e-10) {
                for (int i = 0; i < n_; ++i) q[static_cast<std::size_t>(i) * k + kept] /= nn;
                ++kept;
            }
        }
        return kept;
    }

    bool warm(const std::vector<double>& b, std::vector<double>& out) {
        std::vector<double> qw = q_;
        int k = k_;
        double bscale = frob(b) / std::sqrt(static_cast<double>(n_)) + 1e-30;
        std::vector<double> w, tmat, ritz, br;
        la::EigResult small;
        for (int attempt = 0;; ++attempt) {
            int kept = mgs(qw, k);
            if (kept == 0) return false;
            if (kept != k) {
                // compact columns into a tighter stride
                std::vector<double> q2(static_cast<std::size_t>(n_) * kept);
                for (int i = 0; i < n_; ++i)
                    for (int c = 0; c < kept; ++c)
                        q2[static_cast<std::size_t>(i) * kept + c] = qw[static_cast<std::size_t>(i) * k + c];
                qw = std::move(q2);
                k = kept;
            }
            kernels::sym_times_cols(b, n_, qw, k, w);
            // T = Qw^T W
            la::SymMatrix t(k);
            for (int a = 0; a < k; ++a)
                for (int c = a; c < k; ++c) {
                    double acc = 0.0;
                    for (int i = 0; i < n_; ++i)
                        acc += qw[static_cast<std::size_t>(i) * k + a] * w[static_cast<std::size_t>(i) * k + c];
                    t.set(a, c, acc);
                }
            small = la::sym_eig(t, true);
            // Ritz vectors R = Qw * S and their images BR = W * S
            ritz.assign(static_cast<std::size_t>(n_) * k, 0.0);
            br.assign(static_cast<std::size_t>(n_) * k, 0.0);
            for (int i = 0; i < n_; ++i) {
                const double* qi = &qw[static_cast<std::size_t>(i) * k];
                const double* wi = &w[static_cast<std::size_t>(i) * k];
                double* ri = &ritz[static_cast<std::size_t>(i) * k];
                double* bri = &br[static_cast<std::size_t>(i) * k];
                for (int c = 0; c < k; ++c) {
                    double accr = 0.0, accb = 0.0;
                    for (int a = 0; a < k; ++a) {
                        double s = small.vec(a, c);
                        accr += qi[a] * s;
                        accb += wi[a] * s;
                    }
                    ri[c] = accr;
                    bri[c] = accb;
                }
            }
            double maxres = 0.0;
            for (int c = 0; c < k; ++c) {
                double rr = 0.0;
                for (int i = 0; i < n_; ++i) {
                    double d = br[static_cast<std::size_t>(i) * k + c] -
                               small.values[c] * ritz[static_cast<std::size_t>(i) * k + c];
                    rr += d * d;
                }
                maxres = std::max(maxres, std::sqrt(rr) / (1.0 + std::fabs(small.values[c])));
            }
            if (maxres <= 1e-8 * (1.0 + bscale)) break;
            if (attempt >= 2) return false;
            qw = br;  // advance the subspace by one application of B
        }
        // watchers: if even the buffer went positive the positive spectrum may
        // extend beyond the tracked span
        if (small.values.front() > 0.0 && k < n_) return false;
        std::vector<int> pos;
        for (int c = 0; c < k; ++c)
            if (small.values[c] > 0.0) pos.push_back(c);
        out.assign(static_cast<std::size_t>(n_) * n_, 0.0);
        kernels::rank_k_update(out, n_, ritz, k, small.values, pos, 1.0);
        // next basis: positives plus a buffer of least-negative Ritz columns
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int c) { return small.values[a] > small.values[c]; });
        int nk = 0;
        while (nk < k && small.values[order[nk]] > 0.0) ++nk;
        nk = std::min(k, nk + 6);
        std::vector<double> q2(static_cast<std::size_t>(n_) * nk);
        for (int i = 0; i < n_; ++i)
            for (int c = 0; c < nk; ++c)
                q2[static_cast<std::size_t>(i) * nk + c] = ritz[static_cast<std::size_t>(i) * k + order[c]];
        q_ = std::move(q2);
        k_ = nk;
        ++since_full_;
        ++warms;
        return true;
    }

    int n_;
    const SolveOptions& opt_;
    std::vector<double> q_;
    int k_ = 0;
    int since_full_ = 0;
    bool warm_ok_ = false;
};

// ---------------------------------------------------------------------------
// Type-II Anderson acceleration on the splitting fixed point.  The state is
// the pre-projection pair (matrix, slacks) flattened into one vector; each
// call records the transition S -> S + g and, once two deltas exist, replaces
// the plain image with the extrapolated point.  The least squares is Tikhonov
// regularized and a jump is skipped outright when the coefficients blow up;
// the caller additionally drops the history when a jump raises the residual.
class Anderson {
  public:
    Anderson(std::size_t nmat, std::size_t nslack, int mem)
        : nm_(nmat), nsl_(nslack), n_(nmat + nslack), m_(mem) {
        if (m_ > 0) {
            ds_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
            dg_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
            gram_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
            sprev_.resize(n_);
            gprev_.resize(n_);
        }
    }

    void reset() {
        live_ = 0;
        next_ = 0;
        have_prev_ = false;
    }

    bool advance(const std::vector<double>& smat, const std::vector<double>& ssl,
                 const std::vector<double>& gmat, const std::vector<double>& gsl,
                 std::vector<double>& fmat, std::vector<double>& fsl) {
        if (m_ <= 0) return false;
        if (!have_prev_) {
            store(sprev_, smat, ssl);
            store(gprev_, gmat, gsl);
            have_prev_ = true;
            return false;
        }
        const int j = next_;
        double* dsj = &ds_[static_cast<std::size_t>(j) * n_];
        double* dgj = &dg_[static_cast<std::size_t>(j) * n_];
        diff_into(dsj, smat, ssl, sprev_);
        diff_into(dgj, gmat, gsl, gprev_);
        store(sprev_, smat, ssl);
        store(gprev_, gmat, gsl);
        live_ = std::min(live_ + 1, m_);
        next_ = (next_ + 1) % m_;
        for (int s = 0; s < live_; ++s) {
            const double* dgs = &dg_[static_cast<std::size_t>(s) * n_];
            double acc = 0.0;
            for (std::size_t i = 0; i < n_; ++i) acc += dgj[i] * dgs[i];
            gram_[static_cast<std::size_t>(j) * m_ + s] = acc;
            gram_[static_cast<std::size_t>(s) * m_ + j] = acc;
        }
        if (live_ < 2) return false;

        // (G^T G + lambda I) gamma = G^T g over the live slots
        const int k = live_;
        std::vector<double> a(static_cast<std::size_t>(k) * k);
        double tr = 0.0;
        for (int r = 0; r < k; ++r) tr += gram_[static_cast<std::size_t>(r) * m_ + r];
        const double lambda = 1e-10 * tr + 1e-30;
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c)
                a[static_cast<std::size_t>(r) * k + c] =
                    gram_[static_cast<std::size_t>(r) * m_ + c] + (r == c ? lambda : 0.0);
        std::vector<double> gamma(k);
        for (int s = 0; s < k; ++s) {
            const double* dgs = &dg_[static_cast<std::size_t>(s) * n_];
            double acc = 0.0;
            for (std::size_t i = 0; i < nm_; ++i) acc += dgs[i] * gmat[i];
            for (std::size_t i = 0; i < nsl_; ++i) acc += dgs[nm_ + i] * gsl[i];
            gamma[s] = acc;
        }
        if (!cholesky(a, k)) return false;
        chol_solve(a, k, gamma);
        double gn = 0.0;
        for (double v : gamma) gn += v * v;
        if (!(gn < 1e8)) return false;

        for (int s = 0; s < k; ++s) {
            const double c = gamma[s];
            if (c == 0.0) continue;
            const double* dss = &ds_[static_cast<std::size_t>(s) * n_];
            const double* dgs = &dg_[static_cast<std::size_t>(s) * n_];
            for (std::size_t i = 0; i < nm_; ++i) fmat[i] -= c * (dss[i] + dgs[i]);
            for (std::size_t i = 0; i < nsl_; ++i) fsl[i] -= c * (dss[nm_ + i] + dgs[nm_ + i]);
        }
        return true;
    }

  private:
    void store(std::vector<double>& dst, const std::vector<double>& mat,
               const std::vector<double>& sl) const {
        std::copy(mat.begin(), mat.end(), dst.begin());
        std::copy(sl.begin(), sl.end(), dst.begin() + static_cast<std::ptrdiff_t>(nm_));
    }
    void diff_into(double* dst, const std::vector<double>& mat, const std::vector<double>& sl,
                   const std::vector<double>& prev) const {
        for (std::size_t i = 0; i < nm_; ++i) dst[i] = mat[i] - prev[i];
        for (std::size_t i = 0; i < nsl_; ++i) dst[nm_ + i] = sl[i] - prev[nm_ + i];
    }

    std::size_t nm_, nsl_, n_;
    int m_;
    int live_ = 0, next_ = 0;
    bool have_prev_ = false;
    std::vector<double> ds_, dg_, gram_, sprev_, gprev_;
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, double tol, int max_iter, const SolveOptions& opt) {
    p.validate();
    const int n = p.dim;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const int nf = p.n_free;
    const std::size_t ni = p.ineq_rows.size();
    const double sigma = (p.sense == Sense::maximize) ? 1.0 : -1.0;

    AffineProjector aff(p);
    PsdProjector psd(n, opt);

    // splitting state: the pre-projection pair (smat, ssl).  The cone-side
    // iterate is its projection, the affine side is evaluated at the
    // reflection, and one iteration maps S to S + alpha*(affine - cone).
    std::vector<double> smat(nn, 0.0), ssl(ni, 0.0);
    std::vector<double> zmat(nn, 0.0), xaff(nn, 0.0), bref(nn), zprev(nn, 0.0);
    std::vector<double> gmat(nn), fmat(nn);
    std::vector<double> zs(ni), saff(ni), gsl(ni), fsl(ni);
    std::vector<double> g(nf), y(nf), r0(nf), tgt(ni);

    double rho = opt.rho;
    const double alpha = opt.over_relax;
    Anderson aa(nn, ni, opt.aa_memory);
    bool jumped = false;
    double res_prejump = 0.0;
    int it = 0;
    bool converged = false;
    double rp = 0.0, rd = 0.0;
    bool want_stop = false;

    for (it = 1; it <= max_iter; ++it) {
        // cone step at the current state
        psd.project(smat, zmat, want_stop);
        for (std::size_t r = 0; r < ni; ++r) zs[r] = ssl[r] > 0.0 ? ssl[r] : 0.0;

        // affine step at the reflection, with objective drift
        for (std::size_t i = 0; i < nn; ++i) bref[i] = 2.0 * zmat[i] - smat[i];
        aff.gather(bref, g);
        for (int c = 0; c < nf; ++c) r0[c] = g[c] + sigma * p.objective[c] / rho;
        for (std::size_t r = 0; r < ni; ++r) tgt[r] = 2.0 * zs[r] - ssl[r];
        aff.project(r0, tgt, y, saff);
        aff.scatter(y, xaff);

        // residuals (u = smat - zmat is the scaled dual)
        double rp2 = 0.0, rd2 = 0.0, xs = 0.0, zsc = 0.0, usc = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            double d1 = xaff[i] - zmat[i];
            double d2 = zmat[i] - zprev[i];
            double du = smat[i] - zmat[i];
            gmat[i] = alpha * d1;
            rp2 += d1 * d1;
            rd2 += d2 * d2;
            xs += xaff[i] * xaff[i];
            zsc += zmat[i] * zmat[i];
            usc += du * du;
        }
        for (std::size_t r = 0; r < ni; ++r) {
            double d1 = saff[r] - zs[r];
            gsl[r] = alpha * d1;
            rp2 += d1 * d1;
        }
        rp = std::sqrt(rp2);
        rd = rho * std::sqrt(rd2);
        double scale_p = std::max(1.0, std::max(std::sqrt(xs), std::sqrt(zsc)));
        double scale_d = std::max(1.0, rho * std::sqrt(usc));
        zprev = zmat;

        if (opt.verbose && (it % 100 == 0 || it == 1)) {
            double val = p.objective_const;
            for (int c = 0; c < nf; ++c) val += p.objective[c] * y[c];
            std::fprintf(stderr, "[sdp] it %6d rho %.3g rp %.3e rd %.3e val %.9f\n", it, rho,
                         rp / scale_p, rd / scale_d, val);
        }
        bool pass = (rp <= tol * scale_p) && (rd <= tol * scale_d);
        if (pass) {
            if (want_stop || n < opt.lowrank_min_dim) { converged = true; break; }
            // re-verify once with a guaranteed full cone projection
            want_stop = true;
        } else {
            want_stop = false;
        }

        // a jump that made things worse poisons the window; drop it
        if (jumped && rp > 5.0 * res_prejump) aa.reset();
        res_prejump = rp;

        // plain image, then the accelerated candidate
        for (std::size_t i = 0; i < nn; ++i) fmat[i] = smat[i] + gmat[i];
        for (std::size_t r = 0; r < ni; ++r) fsl[r] = ssl[r] + gsl[r];
        jumped = aa.advance(smat, ssl, gmat, gsl, fmat, fsl);
        smat.swap(fmat);
        ssl.swap(fsl);

        if (opt.adaptive_rho && (it % 25) == 0 && it < max_iter - 50) {
            double rpn = rp / scale_p, rdn = rd / scale_d;
            double f = 1.0;
            if (rpn > 10.0 * rdn) f = 2.0;
            else if (rdn > 10.0 * rpn) f = 0.5;
            if (f != 1.0 && rho * f >= 1e-5 && rho * f <= 1e6) {
                rho *= f;
                // rescale the dual part of the state: s = z + (s - z)/f
                psd.project(smat, zmat, false);
                for (std::size_t i = 0; i < nn; ++i)
                    smat[i] = zmat[i] + (smat[i] - zmat[i]) / f;
                for (std::size_t r = 0; r < ni; ++r) {
                    double zv = ssl[r] > 0.0 ? ssl[r] : 0.0;
                    ssl[r] = zv + (ssl[r] - zv) / f;
                }
                aa.reset();
                jumped = false;
            }
        }
    }

    // polish: plain alternating projection (no drift) until the affine-side
    // iterate is PSD within polish_tol
    double min_eig = 0.0;
    {
        std::vector<double> d, e, zt;
        for (int pit = 0; pit <= opt.polish_max_iter; ++pit) {
            zt = xaff;
            std::vector<double> dd, ee;
            kernels::tridiagonalize(zt, n, dd, ee, true);
            kernels::tql_implicit(dd, ee, zt, n, true);
            min_eig = *std::min_element(dd.begin(), dd.end());
            if (min_eig >= -opt.polish_tol || pit == opt.polish_max_iter) break;
            std::vector<int> neg;
            std::vector<int> pos;
            for (int c = 0; c < n; ++c) {
                if (dd[c] < 0.0) neg.push_back(c);
                else if (dd[c] > 0.0) pos.push_back(c);
            }
            if (pos.size() <= neg.size()) {
                std::fill(bref.begin(), bref.end(), 0.0);
                kernels::rank_k_update(bref, n, zt, n, dd, pos, 1.0);
            } else {
                bref = xaff;
                kernels::rank_k_update(bref, n, zt, n, dd, neg, -1.0);
            }
            aff.gather(bref, g);
            for (std::size_t r = 0; r < ni; ++r) tgt[r] = zs[r] > 0.0 ? zs[r] : 0.0;
            aff.project(g, tgt, y, saff);
            aff.scatter(y, xaff);
            for (std::size_t r = 0; r < ni; ++r) zs[r] = saff[r];
        }
    }

    SdpSolution sol;
    sol.matrix.dim = n;
    sol.matrix.a = xaff;
    sol.y = y;
    sol.value = p.objective_const;
    for (int c = 0; c < nf; ++c) sol.value += p.objective[c] * y[c];
    sol.iterations = it;
    sol.dual_residual = rd;
    sol.psd_violation = std::max(0.0, -min_eig);
    sol.converged = converged;
    // worst affine violation of the returned matrix (rows hold by
    // construction; recompute for the report)
    double worst = 0.0;
    for (const Row& r : p.eq_rows) {
        double acc = -r.rhs;
        for (const Term& t : r.terms) acc += t.coef * y[t.cls];
        worst = std::max(worst, std::fabs(acc) / (1.0 + std::fabs(r.rhs)));
    }
    for (std::size_t r = 0; r < ni; ++r) {
        double acc = -p.ineq_rows[r].rhs;
        for (const Term& t : p.ineq_rows[r].terms) acc += t.coef * y[t.cls];
        double viol = (p.ineq_rel[r] == Rel::le) ? acc : -acc;
        worst = std::max(worst, std::max(0.0, viol) / (1.0 + std::fabs(p.ineq_rows[r].rhs)));
    }
    sol.primal_residual = worst;
    return sol;
}

}  // namespace soslab::sdp
