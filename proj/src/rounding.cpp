#include "soslab/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "json.hpp"
#include "soslab/linalg.hpp"

namespace soslab::round {

using inst::Graph;
using nlohmann::json;

namespace {

void check_vectors(const std::vector<std::vector<double>>& vectors, int n) {
    if (static_cast<int>(vectors.size()) != n)
        throw ValidationError("need one vector per vertex");
    if (n == 0) throw ValidationError("empty vertex set");
    const std::size_t dim = vectors[0].size();
    for (const auto& v : vectors) {
        if (v.size() != dim) throw ValidationError("vectors have mixed dimensions");
        if (la::norm2(v) <= 1e-12) throw ValidationError("zero vector supplied");
    }
}

int cut_size(const Graph& g, const std::vector<char>& side) {
    int cut = 0;
    for (const auto& [u, v] : g.edges)
        if (side[u] != side[v]) ++cut;
    return cut;
}

double choose_count(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - i + 1) / i;
        if (c > 1e18) return 1e18;
    }
    return c;
}

// all size-k subsets of [n] in lex order, visited via callback
template <typename F>
void for_each_subset(int n, int k, F&& f) {
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = i;
    if (k == 0) {
        f(c);
        return;
    }
    if (k > n) return;
    while (true) {
        f(c);
        int i = k - 1;
        while (i >= 0 && c[i] == n - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
}

// orthonormal basis of the chosen columns (dependent ones dropped)
std::vector<std::vector<double>> orthobasis(const std::vector<std::vector<double>>& columns,
                                            const std::vector<int>& chosen) {
    std::vector<std::vector<double>> basis;
    for (int c : chosen) {
        if (c < 0 || c >= static_cast<int>(columns.size()))
            throw ValidationError("column index out of range");
        std::vector<double> w = columns[c];
        const double orig = la::norm2(w);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double d = la::dot(b, w);
                for (std::size_t t = 0; t < w.size(); ++t) w[t] -= d * b[t];
            }
        const double n2 = la::norm2(w);
        if (n2 <= 1e-16 * std::max(1.0, orig)) continue;
        const double inv = 1.0 / std::sqrt(n2);
        for (double& x : w) x *= inv;
        basis.push_back(std::move(w));
    }
    return basis;
}

}  // namespace

GwResult gw_round(const std::vector<std::vector<double>>& vectors, const Graph& g, int samples,
                  std::uint64_t seed) {
    g.validate();
    check_vectors(vectors, g.n);
    if (samples < 1) throw ValidationError("need at least one hyperplane sample");
    const int n = g.n;
    const std::size_t dim = vectors[0].size();
    Rng base(seed);

    auto sample_side = [&](int i) {
        Rng rng = base.derive("hyperplane", static_cast<std::uint64_t>(i));
        std::vector<double> dir(dim);
        for (double& x : dir) x = rng.gaussian();
        std::vector<char> side(n);
        for (int u = 0; u < n; ++u) side[u] = la::dot(dir, vectors[u]) >= 0.0 ? 1 : 0;
        return side;
    };

    std::vector<int> cuts(samples);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < samples; ++i) cuts[i] = cut_size(g, sample_side(i));

    int best_i = 0;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        sum += cuts[i];
        if (cuts[i] > cuts[best_i]) best_i = i;
    }
    GwResult out;
    out.best = cuts[best_i];
    out.mean = sum / samples;
    if (samples > 1) {
        double ss = 0.0;
        for (int c : cuts) ss += (c - out.mean) * (c - out.mean);
        out.se = std::sqrt(ss / (samples - 1) / samples);
    }
    auto side = sample_side(best_i);
    for (int u = 0; u < n; ++u)
        if (side[u]) out.best_side.push_back(u);
    return out;
}

ConditionerSet build_conditioners(const relax::SosSolution& sol, const Key& s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] >= s[i + 1]) throw ValidationError("base set must be sorted and duplicate-free");
    const int ns = static_cast<int>(s.size());
    if (ns > 24) throw BudgetError("conditioner base set too large");
    const unsigned full = (1u << ns) - 1;

    // cache V_T for every subset mask of S
    std::vector<const std::vector<double>*> vt(full + 1);
    for (unsigned t = 0; t <= full; ++t) {
        Key key;
        for (int i = 0; i < ns; ++i)
            if (t >> i & 1) key.push_back(s[i]);
        auto it = sol.vectors.find(LabeledKey{key, {}});
        if (it == sol.vectors.end())
            throw ValidationError("conditioners need key " + key_to_string(key));
        vt[t] = &it->second;
    }
    const std::size_t dim = vt[0]->size();
    check_budget(static_cast<double>(full + 1) * (full + 1) * (dim + 1.0), "conditioner build");

    ConditionerSet out;
    out.base = s;
    out.vectors.assign(full + 1, std::vector<double>(dim, 0.0));
    for (unsigned alpha = 0; alpha <= full; ++alpha) {
        auto& u = out.vectors[alpha];
        // supersets T of alpha^{-1}(1) inside S
        for (unsigned t = alpha;; t = (t + 1) | alpha) {
            const double sign =
                (__builtin_popcount(t) - __builtin_popcount(alpha)) % 2 == 0 ? 1.0 : -1.0;
            const auto& v = *vt[t];
            for (std::size_t d = 0; d < dim; ++d) u[d] += sign * v[d];
            if (t == full) break;
        }
    }
    return out;
}

double projection_residual(const std::vector<std::vector<double>>& columns,
                           const std::vector<int>& chosen) {
    if (columns.empty()) return 0.0;
    auto basis = orthobasis(columns, chosen);
    double res = 0.0;
    for (const auto& v : columns) {
        double captured = 0.0;
        for (const auto& b : basis) {
            const double d = la::dot(b, v);
            captured += d * d;
        }
        res += std::max(0.0, la::norm2(v) - captured);
    }
    return res;
}

std::vector<int> select_columns(const std::vector<std::vector<double>>& columns, int r,
                                int rprime, SelectMode mode) {
    const int m = static_cast<int>(columns.size());
    if (r < 0) throw ValidationError("r must be nonnegative");
    if (rprime < r) throw ValidationError("rprime must be at least r");
    if (rprime > m) throw ValidationError("rprime exceeds the column count");
    for (const auto& v : columns)
        if (v.size() != columns[0].size())
            throw ValidationError("columns have mixed dimensions");

    if (mode == SelectMode::exhaustive) {
        check_budget(choose_count(m, rprime) * m * (rprime + 1.0), "exhaustive column selection");
        std::vector<int> best;
        double best_res = std::numeric_limits<double>::infinity();
        for_each_subset(m, rprime, [&](const std::vector<int>& c) {
            const double res = projection_residual(columns, c);
            if (res < best_res) {
                best_res = res;
                best = c;
            }
        });
        return best;
    }

    // greedy pivoted selection on the residualized columns
    std::vector<std::vector<double>> w = columns;
    std::vector<double> orig(m);
    for (int c = 0; c < m; ++c) orig[c] = std::max(1.0, la::norm2(w[c]));
    std::vector<char> taken(m, 0);
    std::vector<int> out;
    for (int round_i = 0; round_i < rprime; ++round_i) {
        int pick = -1;
        double best_score = -1.0;
        for (int c = 0; c < m; ++c) {
            if (taken[c]) continue;
            const double n2 = la::norm2(w[c]);
            if (n2 <= 1e-16 * orig[c]) continue;
            double score = 0.0;
            for (int i = 0; i < m; ++i) {
                const double d = la::dot(w[c], w[i]);
                score += d * d;
            }
            score /= n2;
            if (score > best_score + 1e-15 * std::max(1.0, best_score)) {
                best_score = score;
                pick = c;
            }
        }
        if (pick < 0) {
            // remaining columns are in the span already; pad with the lowest unchosen
            for (int c = 0; c < m && pick < 0; ++c)
                if (!taken[c]) pick = c;
        }
        taken[pick] = 1;
        out.push_back(pick);
        const double n2 = la::norm2(w[pick]);
        if (n2 > 1e-16 * orig[pick]) {
            std::vector<double> b = w[pick];
            const double inv = 1.0 / std::sqrt(n2);
            for (double& x : b) x *= inv;
            for (int i = 0; i < m; ++i) {
                const double d = la::dot(b, w[i]);
                for (std::size_t t = 0; t < b.size(); ++t) w[i][t] -= d * b[t];
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

RoundingOutcome gs_round(const relax::SosSolution& sol, const Graph& g, int k, int r, int rprime,
                         double eps, std::uint64_t seed, int trials, bool allow_irregular) {
    g.validate();
    const int n = g.n;
    if (n < 1) throw ValidationError("empty graph");
    if (k < 0 || k > n) throw ValidationError("k must be between 0 and n");
    if (trials < 1) throw ValidationError("need at least one trial");
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must be in (0,1)");
    if (r < 0 || rprime < r || rprime > n) throw ValidationError("need 0 <= r <= rprime <= n");
    if (sol.level < rprime + 1)
        throw ValidationError("solution level " + std::to_string(sol.level) +
                              " is below rprime+1 = " + std::to_string(rprime + 1));

    auto degs = g.degrees();
    const int d = *std::max_element(degs.begin(), degs.end());
    if (!allow_irregular)
        for (int u = 0; u < n; ++u)
            if (degs[u] != d)
                throw ValidationError(
                    "gs_round: graph is not regular (the implemented guarantee assumes "
                    "d-regularity); set allow_irregular to round anyway with d = max degree");

    auto phi_it = sol.vectors.find(LabeledKey{{}, {}});
    if (phi_it == sol.vectors.end()) throw ValidationError("solution has no phi vector");
    const auto& vphi = phi_it->second;
    std::vector<std::vector<double>> columns(n);
    for (int u = 0; u < n; ++u) {
        auto it = sol.vectors.find(LabeledKey{Key{u}, {}});
        if (it == sol.vectors.end())
            throw ValidationError("solution is missing vertex " + std::to_string(u));
        columns[u] = it->second;
    }

    const SelectMode mode =
        choose_count(n, rprime) <= 1e5 ? SelectMode::exhaustive : SelectMode::greedy;
    std::vector<int> s = select_columns(columns, r, rprime, mode);

    RoundingOutcome out;
    out.seed_set = Key(s.begin(), s.end());
    out.diagnostic = d * projection_residual(columns, s);
    for (int u = 0; u < n; ++u) out.expected_size += la::dot(vphi, columns[u]);

    ConditionerSet cond = build_conditioners(sol, out.seed_set);
    const int nmask = static_cast<int>(cond.vectors.size());
    std::vector<double> mass(nmask);
    double total = 0.0;
    for (int a = 0; a < nmask; ++a) {
        mass[a] = la::norm2(cond.vectors[a]);
        total += mass[a];
    }
    if (total <= 1e-12) throw SolverError("conditioner mass vanished");

    std::vector<char> in_s(n, 0);
    std::vector<int> pos(n, -1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        in_s[s[i]] = 1;
        pos[s[i]] = static_cast<int>(i);
    }

    Rng base(seed);
    std::vector<int> t_mask(trials), t_cut(trials), t_size(trials);
    std::vector<std::vector<char>> t_in(trials);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < trials; ++t) {
        Rng rng = base.derive("trial", static_cast<std::uint64_t>(t));
        int alpha = -1;
        for (int attempt = 0; attempt < 64 && alpha < 0; ++attempt) {
            double x = rng.uniform_double() * total;
            int cand = nmask - 1;
            for (int a = 0; a < nmask; ++a) {
                x -= mass[a];
                if (x < 0.0) {
                    cand = a;
                    break;
                }
            }
            if (mass[cand] >= 1e-12) alpha = cand;  // near-zero mass: reject and redraw
        }
        if (alpha < 0) {
            alpha = 0;
            for (int a = 1; a < nmask; ++a)
                if (mass[a] > mass[alpha]) alpha = a;
        }
        const auto& u_vec = cond.vectors[alpha];
        std::vector<char> in(n, 0);
        for (int u = 0; u < n; ++u) {
            if (in_s[u]) {
                in[u] = (alpha >> pos[u] & 1) != 0;  // seed vertices follow alpha exactly
                continue;
            }
            double p = la::dot(u_vec, columns[u]) / mass[alpha];
            p = std::min(1.0, std::max(0.0, p));
            in[u] = rng.uniform_double() < p;
        }
        t_mask[t] = alpha;
        t_cut[t] = cut_size(g, in);
        t_size[t] = static_cast<int>(std::count(in.begin(), in.end(), char(1)));
        t_in[t] = std::move(in);
    }

    int best = 0;
    for (int t = 0; t < trials; ++t) {
        out.mean_value += t_cut[t];
        out.mean_size += t_size[t];
        if (t_cut[t] < t_cut[best]) best = t;
    }
    out.mean_value /= trials;
    out.mean_size /= trials;
    out.value = t_cut[best];
    for (int u = 0; u < n; ++u)
        if (t_in[best][u]) out.chosen.push_back(u);
    const int bm = t_mask[best];
    for (std::size_t i = 0; i < s.size(); ++i) out.assignment.push_back(bm >> i & 1);
    out.probs.resize(n);
    for (int u = 0; u < n; ++u)
        out.probs[u] = in_s[u] ? static_cast<double>(bm >> pos[u] & 1)
                               : la::dot(cond.vectors[bm], columns[u]) / mass[bm];
    return out;
}

Conditioned condition_on_vertex(const relax::SosSolution& sol, const Graph& g, int w) {
    g.validate();
    if (w < 0 || w >= g.n) throw ValidationError("vertex out of range");
    if (sol.level < 2) throw ValidationError("conditioning needs a solution of level >= 2");
    auto itw = sol.vectors.find(LabeledKey{Key{w}, {}});
    if (itw == sol.vectors.end()) throw ValidationError("solution is missing the vertex key");
    const double nw2 = la::norm2(itw->second);
    if (nw2 <= 1e-10)
        throw ValidationError("cannot condition on a vertex with a zero-norm vector");
    const double inv = 1.0 / std::sqrt(nw2);

    Conditioned out;
    auto adj = g.adjacency();
    for (int u = 0; u < g.n; ++u)
        if (adj[static_cast<std::size_t>(w) * g.n + u]) out.labels.push_back(u);
    const int nn = static_cast<int>(out.labels.size());
    out.graph.n = nn;
    for (int a = 0; a < nn; ++a)
        for (int b = a + 1; b < nn; ++b)
            if (adj[static_cast<std::size_t>(out.labels[a]) * g.n + out.labels[b]])
                out.graph.edges.push_back({a, b});

    const int rout = sol.level - 1;
    out.solution.level = rout;
    out.solution.dim = sol.dim;
    double count = 0.0;
    for (int size = 0; size <= std::min(rout, nn); ++size) count += choose_count(nn, size);
    check_budget(count * (rout + 1.0), "conditioned solution keys");
    for (int size = 0; size <= std::min(rout, nn); ++size)
        for_each_subset(nn, size, [&](const std::vector<int>& c) {
            Key orig;
            for (int i : c) orig.push_back(out.labels[i]);
            Key with_w = key_union(orig, Key{w});
            auto it = sol.vectors.find(LabeledKey{with_w, {}});
            if (it == sol.vectors.end())
                throw ValidationError("solution is missing key " + key_to_string(with_w));
            std::vector<double> u = it->second;
            for (double& x : u) x *= inv;
            out.solution.vectors.emplace(LabeledKey{Key(c.begin(), c.end()), {}}, std::move(u));
        });
    return out;
}

DistinguishResult distinguish_planted(const Graph& g, int r, double eps, double tol) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must be in (0,1)");
    DistinguishResult out;
    const double d = (1.0 - eps) * std::sqrt(2.0);
    out.threshold = 4.0 * std::sqrt(static_cast<double>(g.n)) / std::pow(d, r + 1);
    auto rel = relax::build_relaxation(relax::Kind::clique, g, {}, r);
    out.frac = relax::solve_relaxation(rel, tol).frac;
    out.label = out.frac > out.threshold ? Label::planted : Label::random_graph;
    return out;
}

std::string outcome_to_json(const RoundingOutcome& o) {
    json j;
    j["chosen"] = o.chosen;
    j["value"] = o.value;
    j["seed_set"] = key_to_string(o.seed_set);
    j["assignment"] = o.assignment;
    j["probs"] = o.probs;
    j["mean_value"] = o.mean_value;
    j["mean_size"] = o.mean_size;
    j["expected_size"] = o.expected_size;
    j["diagnostic"] = o.diagnostic;
    return j.dump() + "\n";
}

std::string gw_to_json(const GwResult& r) {
    json j;
    j["best"] = r.best;
    j["mean"] = r.mean;
    j["se"] = r.se;
    j["best_side"] = r.best_side;
    return j.dump() + "\n";
}

}  // namespace soslab::round
