#include "soslab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "soslab/linalg.hpp"

namespace soslab::inst {

// --- validation -------------------------------------------------------------

void Graph::validate() const {
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw ValidationError("graph: edge endpoint out of range");
        if (u >= v) throw ValidationError("graph: edges must have u < v");
    }
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i - 1] < edges[i]))
            throw ValidationError("graph: edges not sorted/unique");
}

std::vector<char> Graph::adjacency() const {
    std::vector<char> a(static_cast<std::size_t>(n) * n, 0);
    for (const auto& [u, v] : edges) {
        a[static_cast<std::size_t>(u) * n + v] = 1;
        a[static_cast<std::size_t>(v) * n + u] = 1;
    }
    return a;
}

std::vector<int> Graph::degrees() const {
    std::vector<int> d(n, 0);
    for (const auto& [u, v] : edges) {
        ++d[u];
        ++d[v];
    }
    return d;
}

void BipartiteGraph::validate() const {
    for (const auto& [l, r] : edges)
        if (l < 0 || r < 0 || l >= static_cast<int>(left.size()) ||
            r >= static_cast<int>(right.size()))
            throw ValidationError("bipartite graph: edge outside the bipartition");
}

void Hypergraph::validate() const {
    for (const Key& e : edges) {
        if (e.empty()) throw ValidationError("hypergraph: empty hyperedge");
        validate_key(e, n);
    }
}

void LinearCode::validate() const {
    if (!is_prime(q)) throw ValidationError("code: q must be prime");
    if (static_cast<int>(generator.size()) != length)
        throw ValidationError("code: generator row count != length");
    const int d = dim();
    for (const auto& row : generator) {
        if (static_cast<int>(row.size()) != d)
            throw ValidationError("code: ragged generator");
        for (int v : row)
            if (v < 0 || v >= q) throw ValidationError("code: entry outside F_q");
    }
    if (matrix_rank_mod(generator, q) != d)
        throw ValidationError("code: generator not full rank");
}

void CspInstance::validate() const {
    if (K > n) throw ValidationError("csp: K > n");
    if (code.length != K) throw ValidationError("csp: code length != K");
    if (code.q != q) throw ValidationError("csp: code field != q");
    if (static_cast<int>(scopes.size()) != m || static_cast<int>(shifts.size()) != m)
        throw ValidationError("csp: wrong number of constraints");
    for (int i = 0; i < m; ++i) {
        validate_key(scopes[i], n);
        if (static_cast<int>(scopes[i].size()) != K)
            throw ValidationError("csp: scope arity != K");
        if (static_cast<int>(shifts[i].size()) != K)
            throw ValidationError("csp: shift arity != K");
        for (int v : shifts[i])
            if (v < 0 || v >= q) throw ValidationError("csp: shift outside F_q");
    }
    code.validate();
}

void FactorGraph::validate() const {
    std::vector<int> deg(m, 0);
    for (const auto& [i, j] : edges) {
        if (i < 0 || i >= m || j < 0 || j >= n)
            throw ValidationError("factor graph: edge out of range");
        ++deg[i];
    }
    for (int d : deg)
        if (d != K) throw ValidationError("factor graph: constraint degree != K");
}

// --- number theory ----------------------------------------------------------

long long power_mod(long long base, long long exp, long long mod) {
    long long r = 1 % mod;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) r = r * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return r;
}

bool is_prime(int q) {
    if (q < 2) return false;
    for (int p = 2; static_cast<long long>(p) * p <= q; ++p)
        if (q % p == 0) return false;
    return true;
}

int smallest_primitive_root(int q) {
    if (!is_prime(q)) throw ValidationError("primitive root: q must be prime");
    if (q == 2) return 1;
    // factor q-1 once
    std::vector<int> primes;
    int r = q - 1;
    for (int p = 2; static_cast<long long>(p) * p <= r; ++p)
        if (r % p == 0) {
            primes.push_back(p);
            while (r % p == 0) r /= p;
        }
    if (r > 1) primes.push_back(r);
    for (int g = 2; g < q; ++g) {
        bool ok = true;
        for (int p : primes)
            if (power_mod(g, (q - 1) / p, q) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw SolverError("primitive root search failed");  // unreachable for prime q
}

int matrix_rank_mod(std::vector<std::vector<int>> rows, int q) {
    if (rows.empty()) return 0;
    const int nc = static_cast<int>(rows[0].size());
    int rank = 0;
    for (int col = 0; col < nc && rank < static_cast<int>(rows.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r][col] % q != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        const long long inv = power_mod(rows[rank][col], q - 2, q);
        for (int c = col; c < nc; ++c)
            rows[rank][c] = static_cast<int>(rows[rank][c] * inv % q);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
            if (r == rank || rows[r][col] % q == 0) continue;
            const long long f = rows[r][col];
            for (int c = col; c < nc; ++c)
                rows[r][c] = static_cast<int>(((rows[r][c] - f * rows[rank][c]) % q + q) % q);
        }
        ++rank;
    }
    return rank;
}

// --- graph generators ---------------------------------------------------------

namespace {

// one fair coin per unordered pair, substream keyed by the pair's rank
bool pair_coin(const Rng& root, int u, int v) {
    const std::uint64_t idx =
        static_cast<std::uint64_t>(v) * (static_cast<std::uint64_t>(v) - 1) / 2 + u;  // u < v
    return root.derive("edge", idx).coin();
}

}  // namespace

Graph gnp_half(int n, std::uint64_t seed) {
    if (n < 0) throw ValidationError("gnp_half: n < 0");
    Rng root(seed);
    Graph g;
    g.n = n;
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u)
            if (pair_coin(root, u, v)) g.edges.push_back({u, v});
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

std::pair<Graph, std::vector<int>> planted_clique(int n, int k, std::uint64_t seed) {
    if (k < 0 || k > n) throw ValidationError("planted_clique: k out of range");
    Rng root(seed);
    std::vector<int> planted = root.derive("planted").sample_subset(n, k);
    std::vector<char> in_planted(n, 0);
    for (int v : planted) in_planted[v] = 1;
    Graph g;
    g.n = n;
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u)
            if ((in_planted[u] && in_planted[v]) || pair_coin(root, u, v))
                g.edges.push_back({u, v});
    std::sort(g.edges.begin(), g.edges.end());
    return {g, planted};
}

// --- codes ---------------------------------------------------------------------

LinearCode vandermonde_code(int q, int d) {
    if (!is_prime(q)) throw ValidationError("vandermonde_code: q must be prime");
    if (d < 3 || d > q) throw ValidationError("vandermonde_code: need 3 <= D <= q");
    const int g = smallest_primitive_root(q);
    LinearCode code;
    code.q = q;
    code.length = q - 1;
    code.generator.assign(code.length, std::vector<int>(d - 1));
    for (int i = 0; i < code.length; ++i)
        for (int j = 0; j < d - 1; ++j)
            code.generator[i][j] =
                static_cast<int>(power_mod(g, static_cast<long long>(i) * j, q));
    code.validate();
    return code;
}

LinearCode xor_code(int q, int k) {
    if (!is_prime(q)) throw ValidationError("xor_code: q must be prime");
    if (k < 2) throw ValidationError("xor_code: need K >= 2");
    LinearCode code;
    code.q = q;
    code.length = k;
    code.generator.assign(k, std::vector<int>(k - 1, 0));
    for (int j = 0; j < k - 1; ++j) {
        code.generator[j][j] = 1;
        code.generator[k - 1][j] = q - 1;  // last coordinate balances the sum
    }
    code.validate();
    return code;
}

std::vector<std::vector<int>> codewords(const LinearCode& code) {
    const int d = code.dim();
    double count = std::pow(static_cast<double>(code.q), d);
    check_budget(count * code.length, "codeword enumeration");
    const long long total = static_cast<long long>(count + 0.5);
    std::vector<std::vector<int>> words;
    words.reserve(total);
    std::vector<int> msg(d, 0);
    for (long long w = 0; w < total; ++w) {
        std::vector<int> cw(code.length, 0);
        for (int i = 0; i < code.length; ++i) {
            long long acc = 0;
            for (int j = 0; j < d; ++j) acc += static_cast<long long>(code.generator[i][j]) * msg[j];
            cw[i] = static_cast<int>(acc % code.q);
        }
        words.push_back(std::move(cw));
        for (int j = d - 1; j >= 0; --j) {
            if (++msg[j] < code.q) break;
            msg[j] = 0;
        }
    }
    return words;
}

bool check_kwise_uniform(const LinearCode& code, int t) {
    if (t < 1 || t > code.length)
        throw ValidationError("check_kwise_uniform: t out of range");
    const double words = std::pow(static_cast<double>(code.q), code.dim());
    double subsets = 1.0;
    for (int i = 0; i < t; ++i)
        subsets = subsets * (code.length - i) / (i + 1);
    check_budget(words * subsets * std::pow(static_cast<double>(code.q), t),
                 "k-wise uniformity check");

    auto cws = codewords(code);
    const long long expect =
        static_cast<long long>(cws.size()) / static_cast<long long>(std::pow(code.q, t) + 0.5);
    if (static_cast<long long>(cws.size()) % static_cast<long long>(std::pow(code.q, t) + 0.5) != 0)
        return false;

    std::vector<int> pick(t);
    for (int i = 0; i < t; ++i) pick[i] = i;
    std::vector<long long> counts;
    while (true) {
        long long patterns = 1;
        for (int i = 0; i < t; ++i) patterns *= code.q;
        counts.assign(patterns, 0);
        for (const auto& cw : cws) {
            long long idx = 0;
            for (int i = 0; i < t; ++i) idx = idx * code.q + cw[pick[i]];
            ++counts[idx];
        }
        for (long long c : counts)
            if (c != expect) return false;
        // next t-combination of coordinates
        int i = t - 1;
        while (i >= 0 && pick[i] == code.length - t + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < t; ++j) pick[j] = pick[j - 1] + 1;
    }
    return true;
}

// --- CSPs -----------------------------------------------------------------------

CspInstance random_csp(int n, int m, int k, const LinearCode& code, std::uint64_t seed) {
    if (k > n) throw ValidationError("random_csp: K > n");
    if (code.length != k) throw ValidationError("random_csp: code length != K");
    Rng root(seed);
    CspInstance inst;
    inst.n = n;
    inst.m = m;
    inst.K = k;
    inst.q = code.q;
    inst.code = code;
    for (int i = 0; i < m; ++i) {
        Rng sc = root.derive("scope", i);
        inst.scopes.push_back(sc.sample_subset(n, k));
        Rng sh = root.derive("shift", i);
        std::vector<int> b(k);
        for (int& v : b) v = sh.uniform_int(code.q);
        inst.shifts.push_back(std::move(b));
    }
    inst.validate();
    return inst;
}

int sat_count(const CspInstance& inst, const std::vector<int>& x) {
    if (static_cast<int>(x.size()) != inst.n)
        throw ValidationError("sat_count: assignment length != n");
    auto cws = codewords(inst.code);
    std::set<std::vector<int>> codeset(cws.begin(), cws.end());
    int sat = 0;
    std::vector<int> diff(inst.K);
    for (int i = 0; i < inst.m; ++i) {
        for (int t = 0; t < inst.K; ++t) {
            int v = (x[inst.scopes[i][t]] - inst.shifts[i][t]) % inst.q;
            diff[t] = v < 0 ? v + inst.q : v;
        }
        if (codeset.count(diff)) ++sat;
    }
    return sat;
}

FactorGraph factor_graph(const CspInstance& inst) {
    FactorGraph fg;
    fg.m = inst.m;
    fg.n = inst.n;
    fg.K = inst.K;
    for (int i = 0; i < inst.m; ++i)
        for (int v : inst.scopes[i]) fg.edges.push_back({i, v});
    return fg;
}

BipartiteGraph label_extended_graph(const CspInstance& inst, int beta) {
    if (beta <= 0) beta = std::max(1, (inst.m + inst.n - 1) / inst.n);  // Delta = ceil(m/n)
    auto cws = codewords(inst.code);
    check_budget(static_cast<double>(inst.m) * cws.size() * inst.K * beta,
                 "label extended graph");
    BipartiteGraph h;
    // right side: (variable, letter, copy)
    for (int v = 0; v < inst.n; ++v)
        for (int a = 0; a < inst.q; ++a)
            for (int j = 0; j < beta; ++j)
                h.right.push_back("x" + std::to_string(v) + ":a" + std::to_string(a) + ":c" +
                                  std::to_string(j));
    auto right_index = [&](int v, int a, int j) {
        return (static_cast<int>(v) * inst.q + a) * beta + j;
    };
    // left side: (constraint, satisfying assignment) = shifted codewords
    for (int i = 0; i < inst.m; ++i) {
        for (const auto& cw : cws) {
            std::string label = "C" + std::to_string(i) + ":";
            std::vector<int> alpha(inst.K);
            for (int t = 0; t < inst.K; ++t) {
                alpha[t] = (cw[t] + inst.shifts[i][t]) % inst.q;
                label += (t ? "," : "") + std::to_string(alpha[t]);
            }
            const int lidx = static_cast<int>(h.left.size());
            h.left.push_back(label);
            for (int t = 0; t < inst.K; ++t)
                for (int j = 0; j < beta; ++j)
                    h.edges.push_back({lidx, right_index(inst.scopes[i][t], alpha[t], j)});
        }
    }
    h.validate();
    return h;
}

Graph complement(const Graph& g) {
    g.validate();
    auto adj = g.adjacency();
    Graph c;
    c.n = g.n;
    for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v)
            if (!adj[static_cast<std::size_t>(u) * g.n + v]) c.edges.push_back({u, v});
    return c;
}

// --- plausibility ------------------------------------------------------------

namespace {

std::vector<std::vector<int>> constraint_scopes(const FactorGraph& fg) {
    std::vector<std::vector<int>> sc(fg.m);
    for (const auto& [i, j] : fg.edges) sc[i].push_back(j);
    for (auto& s : sc) std::sort(s.begin(), s.end());
    return sc;
}

}  // namespace

PlausibilityReport check_plausibility(const FactorGraph& fg, int tau, double zeta, double eta) {
    if (tau < 1 || tau > fg.K) throw ValidationError("plausibility: need 1 <= tau <= K");
    const int cap = std::min(fg.m, static_cast<int>(std::floor(2.0 * eta * fg.n)));
    // subsets of size <= cap; a violating tau-subgraph extends to a violating
    // full-neighborhood subgraph on the same constraints, so only those need
    // checking
    double work = 0.0, layer = 1.0;
    for (int c = 1; c <= cap; ++c) {
        layer = layer * (fg.m - c + 1) / c;
        work += layer * c;
    }
    check_budget(work * fg.K, "plausibility subset enumeration");

    auto scopes = constraint_scopes(fg);
    const double slack = (tau - zeta) / 2.0;
    PlausibilityReport rep;
    std::vector<int> chosen;
    std::vector<int> cover(fg.n, 0);
    int covered = 0;

    // depth-first over increasing constraint subsets
    auto rec = [&](auto&& self, int next) -> bool {
        if (!chosen.empty()) {
            const int c = static_cast<int>(chosen.size());
            if (covered < fg.K * c - slack * c) {
                rep.holds = false;
                rep.witness = chosen;
                return true;
            }
        }
        if (static_cast<int>(chosen.size()) == cap) return false;
        for (int i = next; i < fg.m; ++i) {
            chosen.push_back(i);
            for (int v : scopes[i])
                if (cover[v]++ == 0) ++covered;
            if (self(self, i + 1)) return true;
            for (int v : scopes[i])
                if (--cover[v] == 0) --covered;
            chosen.pop_back();
        }
        return false;
    };
    rec(rec, 0);
    return rep;
}

PlausibilityReport plausibility_oracle(const FactorGraph& fg, int tau, double zeta, double eta) {
    if (tau < 1 || tau > fg.K) throw ValidationError("plausibility: need 1 <= tau <= K");
    const int cap = std::min(fg.m, static_cast<int>(std::floor(2.0 * eta * fg.n)));
    auto scopes = constraint_scopes(fg);
    const double slack = (tau - zeta) / 2.0;

    // per-constraint menu: keep 0 edges, or any between tau and K of them
    std::vector<std::vector<std::vector<int>>> menus(fg.m);
    double combos = 1.0;
    for (int i = 0; i < fg.m; ++i) {
        auto& menu = menus[i];
        menu.push_back({});  // excluded
        const int deg = static_cast<int>(scopes[i].size());
        for (int mask = 1; mask < (1 << deg); ++mask) {
            if (__builtin_popcount(static_cast<unsigned>(mask)) < tau) continue;
            std::vector<int> vars;
            for (int t = 0; t < deg; ++t)
                if (mask & (1 << t)) vars.push_back(scopes[i][t]);
            menu.push_back(std::move(vars));
        }
        combos *= static_cast<double>(menu.size());
        check_budget(combos, "plausibility oracle");
    }

    PlausibilityReport rep;
    std::vector<int> pick(fg.m, 0);
    while (true) {
        int c = 0, e = 0;
        std::set<int> vars;
        std::vector<int> active;
        for (int i = 0; i < fg.m; ++i) {
            if (pick[i] == 0) continue;
            ++c;
            active.push_back(i);
            const auto& vs = menus[i][pick[i]];
            e += static_cast<int>(vs.size());
            vars.insert(vs.begin(), vs.end());
        }
        if (c >= 1 && c <= cap &&
            static_cast<double>(vars.size()) < e - slack * c) {
            rep.holds = false;
            rep.witness = active;
            return rep;
        }
        int i = fg.m - 1;
        while (i >= 0 && pick[i] == static_cast<int>(menus[i].size()) - 1) pick[i--] = 0;
        if (i < 0) break;
        ++pick[i];
    }
    return rep;
}

namespace {

nlohmann::json parse_or_throw(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad ") + what + " json: " + e.what());
    }
}

template <typename F>
auto decode(const std::string& text, const char* what, F f) {
    auto j = parse_or_throw(text, what);
    try {
        return f(j);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad ") + what + " json: " + e.what());
    }
}

}  // namespace

std::string graph_to_json(const Graph& g) {
    g.validate();
    nlohmann::json j;
    j["n"] = g.n;
    j["edges"] = g.edges;
    return j.dump() + "\n";
}

Graph graph_from_json(const std::string& text) {
    Graph g = decode(text, "graph", [](const nlohmann::json& j) {
        Graph g;
        g.n = j.at("n").get<int>();
        g.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
        return g;
    });
    g.validate();
    return g;
}

std::string csp_to_json(const CspInstance& c) {
    c.validate();
    nlohmann::json j;
    j["n"] = c.n;
    j["m"] = c.m;
    j["K"] = c.K;
    j["q"] = c.q;
    j["scopes"] = c.scopes;
    j["shifts"] = c.shifts;
    j["generator"] = c.code.generator;
    return j.dump() + "\n";
}

CspInstance csp_from_json(const std::string& text) {
    CspInstance c = decode(text, "csp", [](const nlohmann::json& j) {
        CspInstance c;
        c.n = j.at("n").get<int>();
        c.m = j.at("m").get<int>();
        c.K = j.at("K").get<int>();
        c.q = j.at("q").get<int>();
        c.scopes = j.at("scopes").get<std::vector<Key>>();
        c.shifts = j.at("shifts").get<std::vector<std::vector<int>>>();
        c.code.q = c.q;
        c.code.length = c.K;
        c.code.generator = j.at("generator").get<std::vector<std::vector<int>>>();
        return c;
    });
    c.validate();
    return c;
}

std::string hypergraph_to_json(const Hypergraph& h) {
    h.validate();
    nlohmann::json j;
    j["n"] = h.n;
    j["edges"] = h.edges;
    return j.dump() + "\n";
}

Hypergraph hypergraph_from_json(const std::string& text) {
    Hypergraph h = decode(text, "hypergraph", [](const nlohmann::json& j) {
        Hypergraph h;
        h.n = j.at("n").get<int>();
        h.edges = j.at("edges").get<std::vector<Key>>();
        return h;
    });
    h.validate();
    return h;
}

std::string bipartite_to_json(const BipartiteGraph& b) {
    b.validate();
    nlohmann::json j;
    j["left"] = b.left;
    j["right"] = b.right;
    j["edges"] = b.edges;
    return j.dump() + "\n";
}

BipartiteGraph bipartite_from_json(const std::string& text) {
    BipartiteGraph b = decode(text, "bipartite", [](const nlohmann::json& j) {
        BipartiteGraph b;
        b.left = j.at("left").get<std::vector<std::string>>();
        b.right = j.at("right").get<std::vector<std::string>>();
        b.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
        return b;
    });
    b.validate();
    return b;
}

SpectralStats spectral_stats(const Graph& g) {
    g.validate();
    auto deg = g.degrees();
    std::vector<double> isq(g.n);
    for (int i = 0; i < g.n; ++i)
        isq[i] = 1.0 / std::sqrt(static_cast<double>(std::max(deg[i], 1)));
    la::SymMatrix a(g.n);
    for (const auto& [u, v] : g.edges) a.set(u, v, isq[u] * isq[v]);
    SpectralStats st;
    st.adjacency = la::sym_eigvals(a);
    std::reverse(st.adjacency.begin(), st.adjacency.end());
    la::SymMatrix l(g.n);
    for (int i = 0; i < g.n; ++i) l.set(i, i, 1.0);
    for (const auto& [u, v] : g.edges) l.set(u, v, -isq[u] * isq[v]);
    st.laplacian = la::sym_eigvals(l);
    return st;
}

}  // namespace soslab::inst
