#include "soslab/relaxations.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "json.hpp"

namespace soslab::relax {

using inst::Graph;
using nlohmann::json;
using sdp::Rel;
using sdp::Row;
using sdp::SdpProblem;
using sdp::Sense;
using sdp::Term;

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::generic: return "generic";
        case Kind::clique: return "clique";
        case Kind::mis: return "mis";
        case Kind::csp: return "csp";
        case Kind::dks: return "dks";
        case Kind::dksh: return "dksh";
        case Kind::bisection: return "bisection";
        case Kind::ssbve: return "ssbve";
        case Kind::maxcut_gw: return "maxcut_gw";
        case Kind::theta: return "theta";
    }
    throw ValidationError("unknown relaxation kind tag");
}

Kind kind_from_name(const std::string& s) {
    for (Kind k : {Kind::generic, Kind::clique, Kind::mis, Kind::csp, Kind::dks, Kind::dksh,
                   Kind::bisection, Kind::ssbve, Kind::maxcut_gw, Kind::theta})
        if (kind_name(k) == s) return k;
    throw ValidationError("unknown relaxation kind: " + s);
}

namespace {

std::string any_key_to_string(const LabeledKey& k) {
    return k.letters.empty() ? key_to_string(k.vars) : labeled_key_to_string(k);
}

LabeledKey any_key_from_string(const std::string& s) {
    if (s.find(':') != std::string::npos) return labeled_key_from_string(s);
    LabeledKey k;
    k.vars = key_from_string(s);
    return k;
}

double opt_param(const Params& p, const std::string& name, double dflt) {
    auto it = p.find(name);
    return it == p.end() ? dflt : it->second;
}

long get_int_param(const Params& p, const std::string& name) {
    auto it = p.find(name);
    if (it == p.end()) throw ValidationError("missing parameter \"" + name + "\"");
    double r = std::nearbyint(it->second);
    if (std::fabs(it->second - r) > 1e-9)
        throw ValidationError("parameter \"" + name + "\" must be an integer");
    return static_cast<long>(r);
}

// Number of keys the level would need, checked before anything is allocated.
void check_key_budget(Kind kind, int n, int r, int q, double max_keys, bool with_phi) {
    double total = with_phi ? 1.0 : 0.0;
    double choose = 1.0;
    for (int s = 1; s <= std::min(r, n); ++s) {
        choose = choose * (n - s + 1) / s;
        total += choose * std::pow(q > 1 ? static_cast<double>(q) : 1.0, s);
        if (total > 1e18) break;
    }
    if (total > max_keys)
        throw BudgetError(kind_name(kind) + ": level " + std::to_string(r) + " needs about " +
                          std::to_string(static_cast<long long>(total)) +
                          " keys, over the allowed " +
                          std::to_string(static_cast<long long>(max_keys)) +
                          " (raise params[\"max_keys\"] if intended)");
}

// All subsets of [n] of size 1..r (plus the empty set when with_phi), in
// size-then-lex order -- the same order LabeledKey::operator< induces.
std::vector<Key> subsets_by_size(int n, int r, bool with_phi) {
    std::vector<Key> out;
    if (with_phi) out.push_back({});
    for (int s = 1; s <= std::min(r, n); ++s) {
        Key c(s);
        for (int i = 0; i < s; ++i) c[i] = i;
        while (true) {
            out.push_back(c);
            int i = s - 1;
            while (i >= 0 && c[i] == n - s + i) --i;
            if (i < 0) break;
            ++c[i];
            for (int j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
        }
    }
    return out;
}

// Moment-matrix scaffold: keys, entry classes keyed by union, pins.
struct Moment {
    int n = 0;
    int q = 0;  // 0 = unlabeled
    std::vector<LabeledKey> keys;
    std::map<LabeledKey, int> index;
    SdpProblem p;
    std::unordered_map<LabeledKey, int, LabeledKeyHash> ucode;  // union -> code
    std::vector<char> on_diag;                                  // free class sits on the diagonal
    std::vector<ObjectiveEntry> obj_keys;

    int pin(double v) {
        for (std::size_t t = 0; t < p.pin_values.size(); ++t)
            if (p.pin_values[t] == v) return -static_cast<int>(t) - 1;
        p.pin_values.push_back(v);
        return -static_cast<int>(p.pin_values.size());
    }

    int idx(const LabeledKey& k) const {
        auto it = index.find(k);
        if (it == index.end())
            throw SolverError("internal: key not stored: " + any_key_to_string(k));
        return it->second;
    }

    int code(const LabeledKey& u) const {
        auto it = ucode.find(u);
        if (it == ucode.end())
            throw SolverError("internal: union not classed: " + any_key_to_string(u));
        return it->second;
    }
    int code(const Key& vars) const { return code(LabeledKey{vars, {}}); }

    void obj_add(int c, double coef) {
        if (c >= 0) p.objective[c] += coef;
        else p.objective_const += coef * p.pin_values[-c - 1];
    }
};

// pin_rule maps a union's variable set to a forced value (clique/mis zeros,
// unit diagonals); label clashes and ||V_phi||^2 = 1 are handled inside.
Moment build_moment(Kind kind, int n, int q, int r, const Params& params,
                    const std::function<std::optional<double>(const Key&)>& pin_rule,
                    bool with_phi = true) {
    if (n < 0) throw ValidationError("negative variable count");
    if (r < 1) throw ValidationError("level must be >= 1");
    check_key_budget(kind, n, r, q, opt_param(params, "max_keys", la::kMaxDim), with_phi);

    Moment m;
    m.n = n;
    m.q = q;
    for (const Key& s : subsets_by_size(n, r, with_phi)) {
        if (q == 0) {
            m.keys.push_back({s, {}});
            continue;
        }
        std::vector<int> letters(s.size(), 0);
        while (true) {
            m.keys.push_back({s, letters});
            int i = static_cast<int>(letters.size()) - 1;
            while (i >= 0 && letters[i] == q - 1) letters[i--] = 0;
            if (i < 0) break;
            ++letters[i];
        }
    }
    const int nk = static_cast<int>(m.keys.size());
    for (int i = 0; i < nk; ++i) m.index.emplace(m.keys[i], i);

    check_budget(0.5 * nk * (nk + 1) * (2.0 * r + 1), "relaxation entry classes");
    m.p.dim = nk;
    m.p.entry_class.resize(static_cast<std::size_t>(nk) * (nk + 1) / 2);
    int nclass = 0;
    std::size_t pk = 0;
    LabeledKey u;
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j <= i; ++j, ++pk) {
            int code;
            bool consistent = true;
            if (q == 0) {
                u.vars = key_union(m.keys[i].vars, m.keys[j].vars);
                u.letters.clear();
            } else {
                consistent = labeled_union(m.keys[i], m.keys[j], u);
            }
            if (!consistent) {
                code = m.pin(0.0);  // contradicting partial assignments
            } else if (auto it = m.ucode.find(u); it != m.ucode.end()) {
                code = it->second;
            } else {
                std::optional<double> pv;
                if (u.vars.empty()) pv = 1.0;  // ||V_phi||^2 = 1
                else if (pin_rule) pv = pin_rule(u.vars);
                if (pv) {
                    code = m.pin(*pv);
                } else {
                    code = nclass++;
                    m.on_diag.push_back(0);
                }
                m.ucode.emplace(u, code);
            }
            if (code >= 0 && i == j) m.on_diag[code] = 1;
            m.p.entry_class[pk] = code;
        }
    m.p.n_free = nclass;
    m.p.objective.assign(nclass, 0.0);
    return m;
}

// <V_S1,V_S2> >= 0 per entry class; classes with a diagonal representative
// are already nonnegative through the PSD cone and are skipped.
void emit_nonneg(Moment& m) {
    for (int c = 0; c < m.p.n_free; ++c)
        if (!m.on_diag[c]) {
            Row r;
            r.terms.push_back({c, 1.0});
            m.p.add_ineq_row(std::move(r), Rel::ge);
        }
}

// Builds one row; pinned entries fold into the right-hand side.
struct RowBuf {
    Moment& m;
    Row row;
    void add(int code, double coef) {
        if (code >= 0) row.terms.push_back({code, coef});
        else row.rhs -= coef * m.p.pin_values[-code - 1];
    }
};

Row canonize(const Row& r) {
    std::map<int, double> acc;
    for (const Term& t : r.terms) acc[t.cls] += t.coef;
    Row out;
    out.rhs = r.rhs;
    for (const auto& [c, v] : acc)
        if (v != 0.0) out.terms.push_back({c, v});
    return out;
}

// Deduplicating sink: identical rows (common when many stored keys induce
// the same class-space constraint) are inserted once.
struct RowSink {
    Moment& m;
    std::set<std::tuple<int, std::vector<std::pair<int, double>>, double>> seen;

    void eq(const Row& r) { push(r, -1); }
    void ineq(const Row& r, Rel rel) { push(r, rel == Rel::le ? 0 : 1); }

    void push(const Row& r0, int tag) {
        Row r = canonize(r0);
        if (r.terms.empty()) {
            bool ok = tag == -1 ? std::fabs(r.rhs) <= 1e-9
                    : tag == 0  ? 0.0 <= r.rhs + 1e-9
                                : 0.0 >= r.rhs - 1e-9;
            if (!ok) throw ValidationError("relaxation has an infeasible fully-pinned constraint");
            return;
        }
        std::vector<std::pair<int, double>> sig;
        sig.reserve(r.terms.size());
        for (const Term& t : r.terms) sig.emplace_back(t.cls, t.coef);
        if (!seen.insert({tag, std::move(sig), r.rhs}).second) return;
        if (tag == -1) m.p.add_eq_row(std::move(r));
        else m.p.add_ineq_row(std::move(r), tag == 0 ? Rel::le : Rel::ge);
    }
};

// sum_{v in [lo,hi)} <V_v, V_S> = k ||V_S||^2 for every stored key S.
void emit_sum_rows(Moment& m, RowSink& sink, int lo, int hi, double k) {
    for (const LabeledKey& s : m.keys) {
        RowBuf b{m, {}};
        for (int v = lo; v < hi; ++v) b.add(m.code(key_union(s.vars, Key{v})), 1.0);
        b.add(m.code(s.vars), -k);
        sink.eq(b.row);
    }
}

SosRelaxation finish(Kind kind, int level, int n_vars, int q, Moment&& m, Sense sense) {
    m.p.sense = sense;
    m.p.validate();
    SosRelaxation rel;
    rel.kind = kind;
    rel.level = level;
    rel.n_vars = n_vars;
    rel.q = q;
    rel.keys = std::move(m.keys);
    rel.key_index = std::move(m.index);
    rel.sdp = std::move(m.p);
    rel.objective_keys = std::move(m.obj_keys);
    return rel;
}

SosRelaxation build_theta_dual(const Graph& g) {
    // theta(G) = min lambda_max(A) over symmetric A with A_uv = 1 whenever
    // u = v or (u,v) is a non-edge.  Writing X = tI - A: X is PSD with a
    // common diagonal value t - 1, non-edge entries pinned to -1, edge
    // entries free; minimize X_00 + 1.
    const int n = g.n;
    if (n < 1) throw ValidationError("theta needs at least one vertex");
    auto adj = g.adjacency();
    SdpProblem p;
    p.dim = n;
    p.sense = Sense::minimize;
    p.entry_class.resize(static_cast<std::size_t>(n) * (n + 1) / 2);
    int nclass = 1;  // class 0: the shared diagonal
    std::size_t pk = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j, ++pk) {
            if (i == j) p.entry_class[pk] = 0;
            else if (adj[static_cast<std::size_t>(i) * n + j]) p.entry_class[pk] = nclass++;
            else p.entry_class[pk] = -1;
        }
    if (static_cast<std::size_t>(n) * (n - 1) / 2 > g.edges.size()) p.pin_values.push_back(-1.0);
    p.n_free = nclass;
    p.objective.assign(nclass, 0.0);
    p.objective[0] = 1.0;
    p.objective_const = 1.0;
    p.validate();

    SosRelaxation rel;
    rel.kind = Kind::theta;
    rel.level = 1;
    rel.n_vars = n;
    for (int u = 0; u < n; ++u) rel.keys.push_back({Key{u}, {}});
    for (int u = 0; u < n; ++u) rel.key_index.emplace(rel.keys[u], u);
    rel.sdp = std::move(p);
    rel.objective_keys.push_back({0, 0, 1.0});
    return rel;
}

}  // namespace

SosRelaxation build_relaxation(Kind kind, const Graph& g, const Params& params, int r) {
    g.validate();
    const int n = g.n;
    switch (kind) {
        case Kind::clique:
        case Kind::mis: {
            auto adj = g.adjacency();
            const bool forbid_edges = (kind == Kind::mis);
            auto rule = [&](const Key& u) -> std::optional<double> {
                for (std::size_t a = 0; a + 1 < u.size(); ++a)
                    for (std::size_t b = a + 1; b < u.size(); ++b) {
                        bool e = adj[static_cast<std::size_t>(u[a]) * n + u[b]];
                        if (e == forbid_edges) return 0.0;
                    }
                return std::nullopt;
            };
            Moment m = build_moment(kind, n, 0, r, params, rule);
            emit_nonneg(m);
            for (int u = 0; u < n; ++u) {
                m.obj_add(m.code(Key{u}), 1.0);
                int i = m.idx(LabeledKey{Key{u}, {}});
                m.obj_keys.push_back({i, i, 1.0});
            }
            return finish(kind, r, n, 0, std::move(m), Sense::maximize);
        }
        case Kind::dks:
        case Kind::bisection: {
            long k = get_int_param(params, "k");
            if (k < 0 || k > n) throw ValidationError("k must be between 0 and n");
            if (r < 2)
                throw ValidationError(kind_name(kind) +
                                      ": the objective reads pair entries V_{u,v}; level 1 is "
                                      "rejected, use r >= 2");
            Moment m = build_moment(kind, n, 0, r, params, nullptr);
            emit_nonneg(m);
            RowSink sink{m, {}};
            emit_sum_rows(m, sink, 0, n, static_cast<double>(k));
            if (kind == Kind::dks) {
                for (const auto& [u, v] : g.edges) {
                    m.obj_add(m.code(Key{u, v}), 1.0);
                    int i = m.idx(LabeledKey{Key{u, v}, {}});
                    m.obj_keys.push_back({i, i, 1.0});
                }
                return finish(kind, r, n, 0, std::move(m), Sense::maximize);
            }
            // sum over edges of ||V_u - V_v||^2, minimized
            for (const auto& [u, v] : g.edges) {
                m.obj_add(m.code(Key{u}), 1.0);
                m.obj_add(m.code(Key{v}), 1.0);
                m.obj_add(m.code(Key{u, v}), -2.0);
                int iu = m.idx(LabeledKey{Key{u}, {}});
                int iv = m.idx(LabeledKey{Key{v}, {}});
                int ie = m.idx(LabeledKey{Key{u, v}, {}});
                m.obj_keys.push_back({iu, iu, 1.0});
                m.obj_keys.push_back({iv, iv, 1.0});
                m.obj_keys.push_back({ie, ie, -2.0});
            }
            return finish(kind, r, n, 0, std::move(m), Sense::minimize);
        }
        case Kind::maxcut_gw: {
            if (r != 1)
                throw ValidationError("maxcut_gw is a single-level vector program; call with r = 1");
            if (n < 1) throw ValidationError("maxcut_gw needs at least one vertex");
            auto rule = [](const Key& u) -> std::optional<double> {
                if (u.size() == 1) return 1.0;  // unit vectors
                return std::nullopt;
            };
            Moment m = build_moment(kind, n, 0, 1, params, rule, /*with_phi=*/false);
            for (const auto& [u, v] : g.edges) {
                m.obj_add(m.code(Key{u, v}), -0.5);
                m.p.objective_const += 0.5;
                m.obj_keys.push_back(
                    {m.idx(LabeledKey{Key{u}, {}}), m.idx(LabeledKey{Key{v}, {}}), -0.5});
            }
            return finish(kind, 1, n, 0, std::move(m), Sense::maximize);
        }
        case Kind::theta: {
            if (r != 1)
                throw ValidationError("theta is a single-level program; call with r = 1");
            if (opt_param(params, "dual", 0.0) != 0.0) return build_theta_dual(g);
            if (n < 1) throw ValidationError("theta needs at least one vertex");
            auto adj = g.adjacency();
            auto rule = [&](const Key& u) -> std::optional<double> {
                if (u.size() == 2 && adj[static_cast<std::size_t>(u[0]) * n + u[1]])
                    return 0.0;  // adjacent representatives are orthogonal
                return std::nullopt;
            };
            Moment m = build_moment(kind, n, 0, 1, params, rule, /*with_phi=*/false);
            RowBuf tr{m, {}};
            for (int u = 0; u < n; ++u) tr.add(m.code(Key{u}), 1.0);
            tr.row.rhs += 1.0;  // sum of ||W_u||^2 = 1
            m.p.add_eq_row(tr.row);
            for (int u = 0; u < n; ++u) {
                m.obj_add(m.code(Key{u}), 1.0);
                int i = m.idx(LabeledKey{Key{u}, {}});
                m.obj_keys.push_back({i, i, 1.0});
            }
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v)
                    if (!adj[static_cast<std::size_t>(u) * n + v]) {
                        m.obj_add(m.code(Key{u, v}), 2.0);
                        m.obj_keys.push_back(
                            {m.idx(LabeledKey{Key{u}, {}}), m.idx(LabeledKey{Key{v}, {}}), 2.0});
                    }
            return finish(kind, 1, n, 0, std::move(m), Sense::maximize);
        }
        default:
            throw ValidationError(kind_name(kind) + " does not take a plain graph payload");
    }
}

SosRelaxation build_relaxation(Kind kind, const inst::BipartiteGraph& g, const Params& params,
                               int r) {
    if (kind != Kind::ssbve)
        throw ValidationError(kind_name(kind) + " does not take a bipartite payload");
    g.validate();
    const int nl = static_cast<int>(g.left.size());
    const int nr = static_cast<int>(g.right.size());
    const int n = nl + nr;
    long l = get_int_param(params, "l");
    if (l < 0 || l > nl) throw ValidationError("l must be between 0 and |L|");
    Moment m = build_moment(kind, n, 0, r, params, nullptr);
    emit_nonneg(m);
    RowSink sink{m, {}};
    emit_sum_rows(m, sink, 0, nl, static_cast<double>(l));
    // picking u forces every right neighbor: <V_u,V_S> <= <V_v,V_S>
    for (const auto& [li, ri] : g.edges)
        for (const LabeledKey& s : m.keys) {
            RowBuf b{m, {}};
            b.add(m.code(key_union(s.vars, Key{li})), 1.0);
            b.add(m.code(key_union(s.vars, Key{nl + ri})), -1.0);
            sink.ineq(b.row, Rel::le);
        }
    for (int v = 0; v < nr; ++v) {
        m.obj_add(m.code(Key{nl + v}), 1.0);
        int i = m.idx(LabeledKey{Key{nl + v}, {}});
        m.obj_keys.push_back({i, i, 1.0});
    }
    return finish(kind, r, n, 0, std::move(m), Sense::minimize);
}

SosRelaxation build_relaxation(Kind kind, const inst::Hypergraph& h, const Params& params, int r) {
    if (kind != Kind::dksh)
        throw ValidationError(kind_name(kind) + " does not take a hypergraph payload");
    h.validate();
    long k = get_int_param(params, "k");
    if (k < 0 || k > h.n) throw ValidationError("k must be between 0 and n");
    if (r < 2)
        throw ValidationError("dksh: the objective reads hyperedge entries; level 1 is rejected, "
                              "use r >= 2");
    for (const Key& f : h.edges)
        if (static_cast<int>(f.size()) > r)
            throw ValidationError("dksh: hyperedge " + key_to_string(f) +
                                  " has arity above the level; ||V_F||^2 needs |F| <= r");
    Moment m = build_moment(kind, h.n, 0, r, params, nullptr);
    emit_nonneg(m);
    RowSink sink{m, {}};
    emit_sum_rows(m, sink, 0, h.n, static_cast<double>(k));
    for (const Key& f : h.edges) {
        m.obj_add(m.code(f), 1.0);
        int i = m.idx(LabeledKey{f, {}});
        m.obj_keys.push_back({i, i, 1.0});
    }
    return finish(kind, r, h.n, 0, std::move(m), Sense::maximize);
}

SosRelaxation build_relaxation(Kind kind, const inst::CspInstance& c, const Params& params,
                               int r) {
    if (kind != Kind::csp)
        throw ValidationError(kind_name(kind) + " does not take a csp payload");
    c.validate();
    const int half = (c.K + 1) / 2;
    if (r < half)
        throw ValidationError("csp: the objective reads scope assignments as a union of two "
                              "stored keys; need r >= ceil(K/2) = " +
                              std::to_string(half));
    Moment m = build_moment(kind, c.n, c.q, r, params, nullptr);
    emit_nonneg(m);
    RowSink sink{m, {}};
    // every variable is assigned some letter: sum_a <V_{(j,a)}, V_S> = ||V_S||^2
    for (const LabeledKey& s : m.keys)
        for (int j = 0; j < c.n; ++j) {
            RowBuf b{m, {}};
            LabeledKey u;
            for (int a = 0; a < c.q; ++a)
                if (labeled_union(s, LabeledKey{Key{j}, {a}}, u)) b.add(m.code(u), 1.0);
            b.add(m.code(s), -1.0);
            sink.eq(b.row);
        }
    // satisfied assignments of constraint i are the shifted codewords
    auto cws = inst::codewords(c.code);
    check_budget(static_cast<double>(c.m) * cws.size() * (c.K + 2.0), "csp objective");
    for (int i = 0; i < c.m; ++i)
        for (const auto& cw : cws) {
            LabeledKey key;
            key.vars = c.scopes[i];
            key.letters.resize(c.K);
            for (int t = 0; t < c.K; ++t) key.letters[t] = (cw[t] + c.shifts[i][t]) % c.q;
            m.obj_add(m.code(key), 1.0);
            LabeledKey a{Key(key.vars.begin(), key.vars.begin() + half),
                         std::vector<int>(key.letters.begin(), key.letters.begin() + half)};
            LabeledKey b{Key(key.vars.begin() + half, key.vars.end()),
                         std::vector<int>(key.letters.begin() + half, key.letters.end())};
            m.obj_keys.push_back({m.idx(a), m.idx(b), 1.0});
        }
    return finish(kind, r, c.n, c.q, std::move(m), Sense::maximize);
}

SosRelaxation build_relaxation(const GenericProgram& prog, const Params& params, int r) {
    if (prog.n < 0) throw ValidationError("negative variable count");
    if (prog.objective.n() != prog.n)
        throw ValidationError("objective polynomial variable count mismatch");
    if (prog.objective.degree() > r)
        throw ValidationError("objective degree exceeds the level");
    for (const auto& qi : prog.constraints) {
        if (qi.n() != prog.n) throw ValidationError("constraint polynomial variable count mismatch");
        if (qi.degree() > r) throw ValidationError("constraint degree exceeds the level");
    }
    Moment m = build_moment(Kind::generic, prog.n, 0, r, params, nullptr);
    emit_nonneg(m);
    RowSink sink{m, {}};
    // sum_T (q_i)_T <V_T, V_S> >= 0 for every stored key S
    for (const auto& qi : prog.constraints)
        for (const LabeledKey& s : m.keys) {
            RowBuf b{m, {}};
            for (const auto& [t, coef] : qi.terms()) b.add(m.code(key_union(t, s.vars)), coef);
            sink.ineq(b.row, Rel::ge);
        }
    for (const auto& [t, coef] : prog.objective.terms()) {
        m.obj_add(m.code(t), coef);
        int i = m.idx(LabeledKey{t, {}});
        m.obj_keys.push_back({i, i, coef});
    }
    return finish(Kind::generic, r, prog.n, 0, std::move(m), Sense::maximize);
}

SolveResult solve_relaxation(const SosRelaxation& rel, double tol, int max_iter,
                             const sdp::SolveOptions& opt) {
    SolveResult out;
    out.stats = sdp::solve_sdp(rel.sdp, tol, max_iter, opt);
    out.frac = out.stats.value;
    const double gtol = std::max(1e-6, 2.0 * out.stats.psd_violation);
    auto vecs = la::gram_vectors(out.stats.matrix, gtol);
    out.solution.level = rel.level;
    out.solution.dim = vecs.empty() ? 0 : static_cast<int>(vecs[0].size());
    for (std::size_t i = 0; i < rel.keys.size(); ++i)
        out.solution.vectors.emplace(rel.keys[i], std::move(vecs[i]));
    return out;
}

double objective_value(const SosRelaxation& rel, const SosSolution& sol) {
    double v = rel.sdp.objective_const;
    for (const ObjectiveEntry& e : rel.objective_keys) {
        const auto& a = sol.vectors.at(rel.keys[e.i]);
        const auto& b = sol.vectors.at(rel.keys[e.j]);
        v += e.coef * la::dot(a, b);
    }
    return v;
}

std::vector<Violation> verify_solution(const SosRelaxation& rel, const SosSolution& sol,
                                       double tol) {
    const int nk = static_cast<int>(rel.keys.size());
    std::vector<const std::vector<double>*> v(nk);
    for (int i = 0; i < nk; ++i) {
        auto it = sol.vectors.find(rel.keys[i]);
        if (it == sol.vectors.end())
            throw ValidationError("solution is missing key " + any_key_to_string(rel.keys[i]));
        v[i] = &it->second;
    }
    std::vector<Violation> out;
    const SdpProblem& p = rel.sdp;
    std::vector<double> rep(p.n_free, 0.0);
    std::vector<char> seen(p.n_free, 0);
    const bool moment = rel.kind != Kind::maxcut_gw && rel.kind != Kind::theta;
    auto name = [&](int i) { return any_key_to_string(rel.keys[i]); };
    std::size_t pk = 0;
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j <= i; ++j, ++pk) {
            const double mij = la::dot(*v[i], *v[j]);
            const int c = p.entry_class[pk];
            if (c < 0) {
                double d = std::fabs(mij - p.pin_values[-c - 1]);
                if (d > tol) out.push_back({"pin(" + name(i) + "," + name(j) + ")", d});
            } else if (!seen[c]) {
                seen[c] = 1;
                rep[c] = mij;
            } else {
                double d = std::fabs(mij - rep[c]);
                if (d > tol) out.push_back({"consistency(" + name(i) + "," + name(j) + ")", d});
            }
            if (moment && mij < -tol)
                out.push_back({"nonneg(" + name(i) + "," + name(j) + ")", -mij});
        }
    auto eval = [&](const Row& r) {
        double s = -r.rhs;
        for (const Term& t : r.terms) s += t.coef * rep[t.cls];
        return s;
    };
    for (std::size_t t = 0; t < p.eq_rows.size(); ++t) {
        double d = std::fabs(eval(p.eq_rows[t]));
        if (d > tol) out.push_back({"eq_row[" + std::to_string(t) + "]", d});
    }
    for (std::size_t t = 0; t < p.ineq_rows.size(); ++t) {
        double s = eval(p.ineq_rows[t]);
        double d = p.ineq_rel[t] == Rel::le ? s : -s;
        if (d > tol) out.push_back({"ineq_row[" + std::to_string(t) + "]", d});
    }
    return out;
}

double lovasz_theta(const inst::Graph& g, double tol, bool dual) {
    Params params;
    if (dual) params["dual"] = 1.0;
    SosRelaxation rel = build_relaxation(Kind::theta, g, params, 1);
    sdp::SdpSolution s = sdp::solve_sdp(rel.sdp, tol, 100000);
    return s.value;
}

// --- serialization ----------------------------------------------------------

namespace {

json row_to_json(const Row& r) {
    json terms = json::array();
    for (const Term& t : r.terms) terms.push_back(json::array({t.cls, t.coef}));
    return json{{"terms", std::move(terms)}, {"rhs", r.rhs}};
}

Row row_from_json(const json& j) {
    Row r;
    r.rhs = j.at("rhs").get<double>();
    for (const auto& t : j.at("terms"))
        r.terms.push_back({t.at(0).get<int>(), t.at(1).get<double>()});
    return r;
}

}  // namespace

std::string relaxation_to_json(const SosRelaxation& rel) {
    json j;
    j["kind"] = kind_name(rel.kind);
    j["level"] = rel.level;
    j["n_vars"] = rel.n_vars;
    j["q"] = rel.q;
    json keys = json::array();
    for (const auto& k : rel.keys) keys.push_back(any_key_to_string(k));
    j["keys"] = std::move(keys);
    const SdpProblem& p = rel.sdp;
    json sp;
    sp["dim"] = p.dim;
    sp["sense"] = p.sense == Sense::maximize ? "maximize" : "minimize";
    sp["entry_class"] = p.entry_class;
    sp["pin_values"] = p.pin_values;
    sp["n_free"] = p.n_free;
    sp["objective"] = p.objective;
    sp["objective_const"] = p.objective_const;
    json eq = json::array();
    for (const Row& r : p.eq_rows) eq.push_back(row_to_json(r));
    sp["eq_rows"] = std::move(eq);
    json iq = json::array();
    for (std::size_t t = 0; t < p.ineq_rows.size(); ++t) {
        json r = row_to_json(p.ineq_rows[t]);
        r["rel"] = p.ineq_rel[t] == Rel::le ? "le" : "ge";
        iq.push_back(std::move(r));
    }
    sp["ineq_rows"] = std::move(iq);
    j["sdp"] = std::move(sp);
    json ok = json::array();
    for (const ObjectiveEntry& e : rel.objective_keys)
        ok.push_back(json::array({e.i, e.j, e.coef}));
    j["objective_keys"] = std::move(ok);
    return j.dump() + "\n";
}

SosRelaxation relaxation_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        SosRelaxation rel;
        rel.kind = kind_from_name(j.at("kind").get<std::string>());
        rel.level = j.at("level").get<int>();
        rel.n_vars = j.at("n_vars").get<int>();
        rel.q = j.at("q").get<int>();
        for (const auto& k : j.at("keys"))
            rel.keys.push_back(any_key_from_string(k.get<std::string>()));
        for (std::size_t i = 0; i < rel.keys.size(); ++i)
            rel.key_index.emplace(rel.keys[i], static_cast<int>(i));
        const json& sp = j.at("sdp");
        SdpProblem& p = rel.sdp;
        p.dim = sp.at("dim").get<int>();
        p.sense = sp.at("sense").get<std::string>() == "minimize" ? Sense::minimize
                                                                  : Sense::maximize;
        p.entry_class = sp.at("entry_class").get<std::vector<int>>();
        p.pin_values = sp.at("pin_values").get<std::vector<double>>();
        p.n_free = sp.at("n_free").get<int>();
        p.objective = sp.at("objective").get<std::vector<double>>();
        p.objective_const = sp.at("objective_const").get<double>();
        for (const auto& r : sp.at("eq_rows")) p.eq_rows.push_back(row_from_json(r));
        for (const auto& r : sp.at("ineq_rows")) {
            p.ineq_rows.push_back(row_from_json(r));
            p.ineq_rel.push_back(r.at("rel").get<std::string>() == "le" ? Rel::le : Rel::ge);
        }
        for (const auto& e : j.at("objective_keys"))
            rel.objective_keys.push_back(
                {e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        p.validate();
        return rel;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad relaxation json: ") + e.what());
    }
}

std::string solution_to_json(const SosSolution& sol) {
    json j;
    j["level"] = sol.level;
    j["dim"] = sol.dim;
    json v = json::object();
    for (const auto& [k, vec] : sol.vectors) v[any_key_to_string(k)] = vec;
    j["vectors"] = std::move(v);
    return j.dump() + "\n";
}

SosSolution solution_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        SosSolution sol;
        sol.level = j.at("level").get<int>();
        sol.dim = j.at("dim").get<int>();
        for (const auto& [k, vec] : j.at("vectors").items())
            sol.vectors.emplace(any_key_from_string(k), vec.get<std::vector<double>>());
        return sol;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad solution json: ") + e.what());
    }
}

}  // namespace soslab::relax
