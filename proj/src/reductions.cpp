#include "soslab/reductions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>

namespace soslab::reduce {

namespace {

double choose_count(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) {
        c = c * (n - i) / (i + 1);
        if (c > 1e18) return 1e18;
    }
    return c;
}

double subset_count(int n, int up_to) {
    double t = 0.0;
    for (int s = 0; s <= std::min(n, up_to); ++s) t += choose_count(n, s);
    return t;
}

// All subsets of [n] with size <= cap, size-then-lex, phi first.
template <typename F>
void for_each_subset(int n, int cap, F f) {
    Key cur;
    f(cur);
    for (int sz = 1; sz <= std::min(n, cap); ++sz) {
        cur.assign(sz, 0);
        for (int i = 0; i < sz; ++i) cur[i] = i;
        while (true) {
            f(cur);
            int i = sz - 1;
            while (i >= 0 && cur[i] == n - sz + i) --i;
            if (i < 0) break;
            ++cur[i];
            for (int j = i + 1; j < sz; ++j) cur[j] = cur[j - 1] + 1;
        }
    }
}

inst::Graph flatten_bipartite(const inst::BipartiteGraph& b) {
    inst::Graph g;
    const int nl = static_cast<int>(b.left.size());
    g.n = nl + static_cast<int>(b.right.size());
    g.edges.reserve(b.edges.size());
    for (const auto& [l, r] : b.edges) g.edges.push_back({l, nl + r});
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.validate();
    return g;
}

// Decodes flattened H_{I,delta} vertices back to their CSP meaning and maps a
// vertex set to the (T, beta) key of Lemma 3.9 (or to "inconsistent").
struct LemmaMapper {
    const inst::CspInstance& c;
    int delta;
    std::vector<std::vector<int>> cws;
    int nleft;

    LemmaMapper(const inst::CspInstance& src, int d)
        : c(src), delta(d), cws(inst::codewords(src.code)),
          nleft(src.m * static_cast<int>(cws.size())) {}

    // false = inconsistent (the mapped vector is zero)
    bool key_of(const Key& s, LabeledKey& out) const {
        std::map<int, int> asg;
        bool clash = false;
        auto put = [&](int x, int a) {
            auto [it, fresh] = asg.emplace(x, a);
            if (!fresh && it->second != a) clash = true;
        };
        const int ncw = static_cast<int>(cws.size());
        for (int v : s) {
            if (v < nleft) {
                const int i = v / ncw;
                const auto& cw = cws[v % ncw];
                for (int t = 0; t < c.K; ++t)
                    put(c.scopes[i][t], (cw[t] + c.shifts[i][t]) % c.q);
            } else {
                const int rv = v - nleft;
                put(rv / (c.q * delta), (rv / delta) % c.q);
            }
        }
        if (clash) return false;
        out.vars.clear();
        out.letters.clear();
        for (const auto& [x, a] : asg) {
            out.vars.push_back(x);
            out.letters.push_back(a);
        }
        return true;
    }
};

const std::vector<double>& lookup(const relax::SosSolution& sol, const LabeledKey& k,
                                  const char* who) {
    auto it = sol.vectors.find(k);
    if (it == sol.vectors.end())
        throw ValidationError(std::string(who) + ": source solution is missing key " +
                              (k.letters.empty() ? key_to_string(k.vars)
                                                 : labeled_key_to_string(k)));
    return it->second;
}

int resolve_delta(const inst::CspInstance& src, int delta) {
    if (delta <= 0) delta = std::max(1, (src.m + src.n - 1) / src.n);
    return delta;
}

}  // namespace

std::pair<DksReduction, std::optional<relax::SosSolution>> csp_to_dks(
    const inst::CspInstance& src, const std::optional<relax::SosSolution>& sol, int delta,
    int target_level) {
    src.validate();
    DksReduction red;
    red.source = src;
    red.delta = resolve_delta(src, delta);
    red.bip = inst::label_extended_graph(src, red.delta);
    red.graph = flatten_bipartite(red.bip);
    red.k = 2 * src.m;

    std::optional<relax::SosSolution> mapped;
    if (sol) {
        const int cap = sol->level / src.K;
        if (cap < 1)
            throw ValidationError("csp_to_dks: source level " + std::to_string(sol->level) +
                                  " is below K = " + std::to_string(src.K));
        if (target_level <= 0) target_level = cap;
        if (target_level > cap)
            throw ValidationError("csp_to_dks: target level exceeds floor(r/K)");
        check_budget(subset_count(red.graph.n, target_level) * std::max(1, sol->dim),
                     "dks solution mapping");
        LemmaMapper mapper(src, red.delta);
        relax::SosSolution out;
        out.level = target_level;
        out.dim = sol->dim;
        const std::vector<double> zero(sol->dim, 0.0);
        LabeledKey tk;
        for_each_subset(red.graph.n, target_level, [&](const Key& s) {
            LabeledKey key{s, {}};
            if (mapper.key_of(s, tk))
                out.vectors.emplace(std::move(key), lookup(*sol, tk, "csp_to_dks"));
            else
                out.vectors.emplace(std::move(key), zero);
        });
        mapped = std::move(out);
    }
    return {std::move(red), std::move(mapped)};
}

inst::Hypergraph dks_to_dksh(const inst::Graph& g, int t) {
    g.validate();
    if (t < 1) throw ValidationError("dks_to_dksh: t must be >= 1");
    if (t > 20) throw ValidationError("dks_to_dksh: t too large");
    const long long rho = 1ll << (t - 1);
    const double ne = static_cast<double>(g.edges.size());
    check_budget(std::pow(ne, static_cast<double>(rho)) * static_cast<double>(rho),
                 "hypergraph powering");
    std::set<Key> out;
    std::vector<int> pick(rho, 0);
    const int m = static_cast<int>(g.edges.size());
    if (m > 0) {
        while (true) {
            std::set<int> u;
            for (long long i = 0; i < rho; ++i) {
                u.insert(g.edges[pick[i]].first);
                u.insert(g.edges[pick[i]].second);
            }
            out.emplace(u.begin(), u.end());
            long long i = rho - 1;
            while (i >= 0 && pick[i] == m - 1) pick[i--] = 0;
            if (i < 0) break;
            ++pick[i];
        }
    }
    inst::Hypergraph h;
    h.n = g.n;
    h.edges.assign(out.begin(), out.end());
    h.validate();
    return h;
}

std::pair<double, double> hyper_tuple_bound(const relax::SosSolution& sol,
                                            const std::vector<std::pair<int, int>>& edges,
                                            int p) {
    if (p < 0 || p > 20) throw ValidationError("hyper_tuple_bound: p out of range");
    const long long width = 1ll << p;
    const int m = static_cast<int>(edges.size());
    check_budget(std::pow(static_cast<double>(m), static_cast<double>(width)) *
                     static_cast<double>(width),
                 "tuple enumeration");

    auto norm_at = [&](const Key& u) {
        auto it = sol.vectors.find(LabeledKey{u, {}});
        if (it == sol.vectors.end())
            throw ValidationError("hyper_tuple_bound: solution is missing key " +
                                  key_to_string(u));
        double s = 0.0;
        for (double x : it->second) s += x * x;
        return s;
    };

    // FRAC with compensated summation; the p = 0 tuple sum reuses this exact
    // accumulation so the two returned numbers coincide bit for bit there.
    auto kahan_add = [](double& s, double& comp, double x) {
        double y = x - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    };
    double frac = 0.0, fc = 0.0;
    for (const auto& [u, v] : edges)
        kahan_add(frac, fc, norm_at(Key{std::min(u, v), std::max(u, v)}));
    const double rhs = std::pow(frac, static_cast<double>(width));
    if (p == 0) return {frac, rhs};

    // odometer over ordered tuples, last position fastest; sharded over the
    // leading edge with per-shard compensated sums reduced in index order
    std::vector<double> partial(m, 0.0);
#pragma omp parallel for schedule(static)
    for (int first = 0; first < m; ++first) {
        double s = 0.0, comp = 0.0;
        std::vector<int> pick(width, 0);
        pick[0] = first;
        while (true) {
            std::set<int> u;
            for (long long i = 0; i < width; ++i) {
                u.insert(edges[pick[i]].first);
                u.insert(edges[pick[i]].second);
            }
            kahan_add(s, comp, norm_at(Key(u.begin(), u.end())));
            long long i = width - 1;
            while (i >= 1 && pick[i] == m - 1) pick[i--] = 0;
            if (i < 1) break;
            ++pick[i];
        }
        partial[first] = s;
    }
    double lhs = 0.0, lc = 0.0;
    for (int first = 0; first < m; ++first) kahan_add(lhs, lc, partial[first]);
    return {lhs, rhs};
}

std::pair<SsbveReduction, std::optional<relax::SosSolution>> csp_to_ssbve(
    const inst::CspInstance& src, const std::optional<relax::SosSolution>& dks_sol,
    const std::optional<relax::SosSolution>& source_sol, int delta) {
    src.validate();
    SsbveReduction red;
    red.source = src;
    red.delta = resolve_delta(src, delta);
    auto h = inst::label_extended_graph(src, red.delta);
    red.base = flatten_bipartite(h);
    red.l = red.delta * src.m * src.K;

    // subdivision: left = edges of the base graph, right = its vertices
    const int nl = static_cast<int>(h.left.size());
    for (std::size_t e = 0; e < red.base.edges.size(); ++e) {
        const auto& [u, v] = red.base.edges[e];
        red.bip.left.push_back("e" + std::to_string(e) + ":" + std::to_string(u) + "-" +
                               std::to_string(v));
        red.bip.edges.push_back({static_cast<int>(e), u});
        red.bip.edges.push_back({static_cast<int>(e), v});
    }
    for (int v = 0; v < red.base.n; ++v)
        red.bip.right.push_back(v < nl ? h.left[v] : h.right[v - nl]);
    red.bip.validate();

    std::optional<relax::SosSolution> mapped;
    if (dks_sol) {
        const int rprime = dks_sol->level;
        const int target = rprime / 2 - 4;
        if (target < 1)
            throw ValidationError("csp_to_ssbve: level arithmetic r'/2 - 4 = " +
                                  std::to_string(target) + " is below 1 (need r' >= 10)");
        if (source_sol) {
            // pairing spot check: V on singleton right vertices must be the
            // source W on the matching (variable, letter) key
            LemmaMapper mapper(src, red.delta);
            for (int v : {mapper.nleft, red.base.n - 1}) {
                LabeledKey tk;
                if (!mapper.key_of(Key{v}, tk)) continue;
                const auto& a = lookup(*dks_sol, LabeledKey{Key{v}, {}}, "csp_to_ssbve");
                const auto& b = lookup(*source_sol, tk, "csp_to_ssbve");
                double d2 = 0.0;
                for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
                    d2 += (a[i] - b[i]) * (a[i] - b[i]);
                if (a.size() != b.size() || d2 > 1e-12)
                    throw ValidationError(
                        "csp_to_ssbve: solutions are not the Lemma-mapped pair");
            }
        }
        const int nsub = static_cast<int>(red.bip.left.size() + red.bip.right.size());
        check_budget(subset_count(nsub, target) * std::max(1, dks_sol->dim),
                     "ssbve solution mapping");
        const int nedges = static_cast<int>(red.base.edges.size());
        relax::SosSolution out;
        out.level = target;
        out.dim = dks_sol->dim;
        for_each_subset(nsub, target, [&](const Key& s) {
            // B(S) = (R cap S) u N(L cap S) in base-graph vertex ids
            std::set<int> b;
            for (int v : s) {
                if (v < nedges) {
                    b.insert(red.base.edges[v].first);
                    b.insert(red.base.edges[v].second);
                } else {
                    b.insert(v - nedges);
                }
            }
            Key bk(b.begin(), b.end());
            out.vectors.emplace(LabeledKey{s, {}},
                                lookup(*dks_sol, LabeledKey{bk, {}}, "csp_to_ssbve"));
        });
        mapped = std::move(out);
    }
    return {std::move(red), std::move(mapped)};
}

namespace {

std::vector<std::uint64_t> adjacency_masks(const inst::Graph& g) {
    std::vector<std::uint64_t> adj(g.n, 0);
    for (const auto& [u, v] : g.edges) {
        adj[u] |= 1ull << v;
        adj[v] |= 1ull << u;
    }
    return adj;
}

long long brute_clique(const inst::Graph& g) {
    if (g.n > 62) throw BudgetError("brute clique: n > 62");
    check_budget(std::ldexp(1.0, g.n), "brute clique");
    auto adj = adjacency_masks(g);
    const std::uint64_t total = 1ull << g.n;
    std::vector<char> is_clique(total, 0);
    is_clique[0] = 1;
    long long best = 0;
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        const int low = std::countr_zero(mask);
        const std::uint64_t rest = mask & (mask - 1);
        if (is_clique[rest] && (rest & ~adj[low]) == 0) {
            is_clique[mask] = 1;
            best = std::max(best, static_cast<long long>(std::popcount(mask)));
        }
    }
    return best;
}

template <typename F>
long long best_over_ksets(int n, int k, const char* what, F score) {
    if (n > 62) throw BudgetError(std::string(what) + ": n > 62");
    if (k < 0 || k > n) throw ValidationError(std::string(what) + ": bad cardinality");
    check_budget(choose_count(n, k), what);
    long long best = std::numeric_limits<long long>::min();
    Key cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        std::uint64_t mask = 0;
        for (int v : cur) mask |= 1ull << v;
        best = std::max(best, score(mask));
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return best;
}

long long brute_dks(const inst::Graph& g, int k) {
    auto adj = adjacency_masks(g);
    return best_over_ksets(g.n, k, "brute dks", [&](std::uint64_t mask) {
        long long cnt = 0;
        for (int v = 0; v < g.n; ++v)
            if (mask & (1ull << v)) cnt += std::popcount(adj[v] & mask);
        return cnt / 2;
    });
}

long long brute_bisection(const inst::Graph& g, int k) {
    long long best = -best_over_ksets(g.n, k, "brute bisection", [&](std::uint64_t mask) {
        long long cut = 0;
        for (const auto& [u, v] : g.edges)
            cut += ((mask >> u) ^ (mask >> v)) & 1ull;
        return -cut;
    });
    return best;
}

long long brute_maxcut(const inst::Graph& g) {
    if (g.n > 62) throw BudgetError("brute maxcut: n > 62");
    check_budget(std::ldexp(1.0, std::max(0, g.n - 1)), "brute maxcut");
    long long best = 0;
    const std::uint64_t total = g.n > 0 ? (1ull << (g.n - 1)) : 1;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        long long cut = 0;
        for (const auto& [u, v] : g.edges)
            cut += ((mask >> u) ^ (mask >> v)) & 1ull;
        best = std::max(best, cut);
    }
    return best;
}

}  // namespace

long long brute_force_opt(relax::Kind kind, const inst::Graph& g, int param) {
    g.validate();
    switch (kind) {
        case relax::Kind::clique: return brute_clique(g);
        case relax::Kind::mis: return brute_clique(inst::complement(g));
        case relax::Kind::dks: return brute_dks(g, param);
        case relax::Kind::bisection: return brute_bisection(g, param);
        case relax::Kind::maxcut_gw: return brute_maxcut(g);
        default:
            throw ValidationError("brute_force_opt: kind " + relax::kind_name(kind) +
                                  " does not take a plain graph");
    }
}

long long brute_force_opt(relax::Kind kind, const inst::Hypergraph& h, int param) {
    h.validate();
    if (kind != relax::Kind::dksh)
        throw ValidationError("brute_force_opt: kind " + relax::kind_name(kind) +
                              " does not take a hypergraph");
    std::vector<std::uint64_t> emasks;
    if (h.n > 62) throw BudgetError("brute dksh: n > 62");
    for (const Key& f : h.edges) {
        std::uint64_t m = 0;
        for (int v : f) m |= 1ull << v;
        emasks.push_back(m);
    }
    return best_over_ksets(h.n, param, "brute dksh", [&](std::uint64_t mask) {
        long long cnt = 0;
        for (std::uint64_t em : emasks) cnt += (em & ~mask) == 0;
        return cnt;
    });
}

long long brute_force_opt(relax::Kind kind, const inst::BipartiteGraph& b, int param) {
    b.validate();
    if (kind != relax::Kind::ssbve)
        throw ValidationError("brute_force_opt: kind " + relax::kind_name(kind) +
                              " does not take a bipartite graph");
    const int nl = static_cast<int>(b.left.size());
    const int nr = static_cast<int>(b.right.size());
    const int words = (nr + 63) / 64;
    std::vector<std::uint64_t> nbr(static_cast<std::size_t>(nl) * words, 0);
    for (const auto& [l, r] : b.edges) nbr[static_cast<std::size_t>(l) * words + r / 64] |=
        1ull << (r % 64);
    if (param < 0 || param > nl) throw ValidationError("brute ssbve: bad l");
    check_budget(choose_count(nl, param) * words, "brute ssbve");
    long long best = std::numeric_limits<long long>::max();
    Key cur(param);
    for (int i = 0; i < param; ++i) cur[i] = i;
    std::vector<std::uint64_t> acc(words);
    while (true) {
        std::fill(acc.begin(), acc.end(), 0);
        for (int l : cur)
            for (int w = 0; w < words; ++w) acc[w] |= nbr[static_cast<std::size_t>(l) * words + w];
        long long sz = 0;
        for (std::uint64_t w : acc) sz += std::popcount(w);
        best = std::min(best, sz);
        if (param == 0) break;
        int i = param - 1;
        while (i >= 0 && cur[i] == nl - param + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < param; ++j) cur[j] = cur[j - 1] + 1;
    }
    return best;
}

long long brute_force_opt(const inst::CspInstance& c) {
    c.validate();
    check_budget(std::pow(static_cast<double>(c.q), static_cast<double>(c.n)), "brute csp");
    std::vector<int> x(c.n, 0);
    long long best = 0;
    while (true) {
        best = std::max(best, static_cast<long long>(inst::sat_count(c, x)));
        int i = c.n - 1;
        while (i >= 0 && x[i] == c.q - 1) x[i--] = 0;
        if (i < 0) break;
        ++x[i];
    }
    return best;
}

}  // namespace soslab::reduce
