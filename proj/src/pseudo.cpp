#include "soslab/pseudo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>

#include "json.hpp"

namespace soslab::pe {

namespace {

using nlohmann::json;
using poly::Rational;

Rational frac(long long num, long long den) {
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
}

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

// Subsets of [n] with size <= cap, size-then-lex, phi first (the canonical
// key order used by the relaxation builders).
std::vector<Key> keys_up_to(int n, int cap) {
    std::vector<Key> out;
    out.push_back({});
    for (int sz = 1; sz <= std::min(n, cap); ++sz) {
        Key cur(sz);
        for (int i = 0; i < sz; ++i) cur[i] = i;
        while (true) {
            out.push_back(cur);
            int i = sz - 1;
            while (i >= 0 && cur[i] == n - sz + i) --i;
            if (i < 0) break;
            ++cur[i];
            for (int j = i + 1; j < sz; ++j) cur[j] = cur[j - 1] + 1;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> sorted_pairs(const std::vector<std::pair<int, int>>& t,
                                              const char* who) {
    auto s = t;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw ValidationError(std::string(who) + ": T has a repeated pair");
    return s;
}

}  // namespace

void EdgeSet::validate(int n) const {
    for (const auto& [u, v] : edges)
        if (u < 0 || v <= u || v >= n) throw ValidationError("edge set: bad pair");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i - 1] < edges[i]))
            throw ValidationError("edge set: pairs must be strictly increasing");
}

Key EdgeSet::vertex_support() const {
    std::set<int> s;
    for (const auto& [u, v] : edges) {
        s.insert(u);
        s.insert(v);
    }
    return Key(s.begin(), s.end());
}

double Pseudoexpectation::at(const Key& k) const {
    auto it = values.find(k);
    if (it == values.end())
        throw ValidationError("pseudoexpectation is missing moment " + key_to_string(k));
    return it->second;
}

// --- the equivalence --------------------------------------------------------

Pseudoexpectation vectors_to_pe(const relax::SosSolution& sol) {
    auto phi = sol.vectors.find(LabeledKey{});
    if (phi == sol.vectors.end())
        throw ValidationError("vectors_to_pe: solution has no phi vector");
    Pseudoexpectation out;
    out.degree = sol.level;
    for (const auto& [k, v] : sol.vectors) {
        if (!k.letters.empty())
            throw ValidationError("vectors_to_pe: labeled (csp) solutions are not supported");
        if (!k.vars.empty()) out.n = std::max(out.n, k.vars.back() + 1);
        out.values[k.vars] = la::dot(phi->second, v);
    }
    return out;
}

la::SymMatrix moment_matrix(const Pseudoexpectation& p, int r) {
    if (r < 0) throw ValidationError("moment_matrix: negative level");
    if (2 * r > p.degree)
        throw ValidationError("moment_matrix: needs moments up to degree " +
                              std::to_string(2 * r) + ", operator has " +
                              std::to_string(p.degree));
    auto keys = keys_up_to(p.n, r);
    check_budget(static_cast<double>(keys.size()) * keys.size(), "moment matrix");
    la::SymMatrix m(static_cast<int>(keys.size()));
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j <= i; ++j) m.set(i, j, p.at(key_union(keys[i], keys[j])));
    return m;
}

relax::SosSolution pe_to_vectors(const Pseudoexpectation& p, int r, double tol) {
    la::SymMatrix m = moment_matrix(p, r);
    la::EigResult eig = la::sym_eig(m, true);
    if (m.dim > 0 && eig.values.front() < -tol)
        throw ValidationError("pe_to_vectors: moment matrix eigenvalue " +
                              std::to_string(eig.values.front()) + " below -" +
                              std::to_string(tol));
    auto keys = keys_up_to(p.n, r);
    std::vector<double> scale(m.dim);
    for (int c = 0; c < m.dim; ++c) scale[c] = std::sqrt(std::max(eig.values[c], 0.0));
    relax::SosSolution out;
    out.level = r;
    out.dim = m.dim;
    for (int i = 0; i < m.dim; ++i) {
        std::vector<double> v(m.dim);
        for (int c = 0; c < m.dim; ++c) v[c] = eig.vec(i, c) * scale[c];
        out.vectors.emplace(LabeledKey{keys[i], {}}, std::move(v));
    }
    return out;
}

PeReport pe_check(const Pseudoexpectation& p, const relax::GenericProgram& prog, double tol) {
    if (prog.n > p.n)
        throw ValidationError("pe_check: program has more variables than the operator");
    PeReport rep;
    rep.one_violation = std::fabs(p.at({}) - 1.0);
    for (std::size_t i = 0; i < prog.constraints.size(); ++i) {
        const auto& qi = prog.constraints[i];
        const int cap = p.degree - qi.degree();
        if (cap < 0)
            throw ValidationError("pe_check: constraint degree exceeds the operator degree");
        check_budget(subset_count(p.n, cap) * std::max<std::size_t>(1, qi.terms().size()),
                     "pseudoexpectation feasibility scan");
        for (const Key& s : keys_up_to(p.n, cap)) {
            double v = 0.0;
            for (const auto& [t, coef] : qi.terms()) v += coef * p.at(key_union(t, s));
            if (std::fabs(v) > rep.constraint_violation) {
                rep.constraint_violation = std::fabs(v);
                rep.worst_constraint = "q" + std::to_string(i) + " * " + key_to_string(s);
            }
        }
    }
    la::SymMatrix m = moment_matrix(p, p.degree / 2);
    rep.min_eigenvalue = la::sym_eigvals(m).front();
    rep.passes = rep.one_violation <= tol && rep.constraint_violation <= tol &&
                 rep.min_eigenvalue >= -tol;
    return rep;
}

double apply(const Pseudoexpectation& p, const poly::MultilinearPoly& f) {
    double v = 0.0;
    for (const auto& [t, coef] : f.terms()) v += coef * p.at(t);
    return v;
}

Rational apply_exact(const Pseudoexpectation& p, const std::map<Key, Rational>& coeffs) {
    if (p.exact.empty() && !p.values.empty())
        throw ValidationError("apply_exact: operator has no exact moments");
    Rational v(0);
    for (const auto& [k, coef] : coeffs) {
        auto it = p.exact.find(k);
        if (it == p.exact.end())
            throw ValidationError("apply_exact: missing moment " + key_to_string(k));
        v += coef * it->second;
    }
    return v;
}

// --- pseudocalibration: planted clique --------------------------------------

Rational pcal_clique_coeff(long n, long k, long t, bool exact) {
    if (n < 1 || k < 0 || k > n || t < 0 || t > n)
        throw ValidationError("pcal_clique_coeff: bad parameters");
    if (t > k) return Rational(0);
    if (exact) return poly::binomial(n - t, k - t) / poly::binomial(n, k);
    Rational base = frac(k, n);
    Rational r(1);
    for (long i = 0; i < t; ++i) r *= base;
    return r;
}

Pseudoexpectation pcal_clique_pe(const inst::Graph& g, int k, int r, int tau, bool exact) {
    g.validate();
    const int n = g.n;
    if (k < 1 || k > n) throw ValidationError("pcal_clique_pe: k outside [1, n]");
    if (r < 0 || tau < 0) throw ValidationError("pcal_clique_pe: negative level or tau");
    const int smax = std::min(2 * r, n);
    const int wmax = std::min(tau, n);

    // work estimate: for each S, supersets W and all edge subsets within W
    double total = 0.0;
    for (int s = 0; s <= smax; ++s) {
        double per = 1.0;
        for (int w = s; w <= wmax; ++w) {
            const int e = w * (w - 1) / 2;
            per += choose_count(n - s, w - s) * std::ldexp(1.0, e) * std::max(1, e);
        }
        total += choose_count(n, s) * per;
    }
    check_budget(total, "clique pseudocalibration");

    std::vector<signed char> sign(static_cast<std::size_t>(n) * n, -1);
    for (const auto& [u, v] : g.edges) {
        sign[static_cast<std::size_t>(u) * n + v] = 1;
        sign[static_cast<std::size_t>(v) * n + u] = 1;
    }
    std::vector<Rational> cw(wmax + 1);
    std::vector<double> cwd(wmax + 1);
    for (int w = 0; w <= wmax; ++w) {
        cw[w] = pcal_clique_coeff(n, k, w, exact);
        cwd[w] = cw[w].get_d();
    }

    Pseudoexpectation out;
    out.n = n;
    out.degree = 2 * r;
    for (const Key& s : keys_up_to(n, smax)) {
        Rational acc(0);
        double accd = 0.0;
        const int ssz = static_cast<int>(s.size());
        std::vector<char> in_s(n, 0);
        for (int v : s) in_s[v] = 1;
        std::vector<int> pool;
        for (int v = 0; v < n; ++v)
            if (!in_s[v]) pool.push_back(v);
        const int np = static_cast<int>(pool.size());
        for (int w = ssz; w <= wmax; ++w) {
            // choose the w - |S| extra vertices from [n] \ S
            const int extra = w - ssz;
            if (extra > np) break;
            std::vector<int> pick(extra);
            for (int i = 0; i < extra; ++i) pick[i] = i;
            while (true) {
                Key wset = s;
                for (int i : pick) wset.push_back(pool[i]);
                std::sort(wset.begin(), wset.end());
                // edges within W; cover bits index the positions outside S
                std::vector<std::uint64_t> cover;
                std::vector<char> neg;
                std::uint64_t need = 0;
                for (int a = 0; a < w; ++a) {
                    if (!in_s[wset[a]]) need |= 1ull << a;
                    for (int b = a + 1; b < w; ++b) {
                        std::uint64_t c = 0;
                        if (!in_s[wset[a]]) c |= 1ull << a;
                        if (!in_s[wset[b]]) c |= 1ull << b;
                        cover.push_back(c);
                        neg.push_back(
                            sign[static_cast<std::size_t>(wset[a]) * n + wset[b]] < 0);
                    }
                }
                const int ne = static_cast<int>(cover.size());
                for (std::uint64_t mask = 0; mask < (1ull << ne); ++mask) {
                    std::uint64_t got = 0;
                    int flips = 0;
                    for (int e = 0; e < ne; ++e)
                        if (mask >> e & 1) {
                            got |= cover[e];
                            flips += neg[e];
                        }
                    if (got != need) continue;  // V(T) u S is a smaller set
                    const int chi = (flips & 1) ? -1 : 1;
                    if (exact) {
                        if (chi > 0)
                            acc += cw[w];
                        else
                            acc -= cw[w];
                    } else {
                        accd += chi * cwd[w];
                    }
                }
                if (extra == 0) break;
                int i = extra - 1;
                while (i >= 0 && pick[i] == np - extra + i) --i;
                if (i < 0) break;
                ++pick[i];
                for (int j = i + 1; j < extra; ++j) pick[j] = pick[j - 1] + 1;
            }
        }
        if (exact) {
            out.exact[s] = acc;
            out.values[s] = acc.get_d();
        } else {
            out.values[s] = accd;
        }
    }
    return out;
}

Rational pcal_clique_oracle(int n, int k, const Key& s, const EdgeSet& t) {
    if (n < 1 || n > 62 || k < 1 || k > n)
        throw ValidationError("pcal_clique_oracle: bad parameters");
    validate_key(s, n);
    t.validate(n);
    Rational total = poly::binomial(n, k);
    if (total > 100000) throw BudgetError("pcal_clique_oracle: C(n,k) exceeds 1e5");

    std::uint64_t req = 0;
    for (int v : s) req |= 1ull << v;
    for (int v : t.vertex_support()) req |= 1ull << v;

    // every placement with S u V(T) inside the clique contributes 1; any edge
    // of T left outside averages to zero over the +-1 coin of that edge
    long long count = 0;
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
        std::uint64_t mask = 0;
        for (int v : pick) mask |= 1ull << v;
        count += (req & ~mask) == 0;
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return Rational(static_cast<long>(count)) / total;
}

// --- pseudocalibration: boolean Max K-CSP -----------------------------------

namespace {

void validate_csp_query(const inst::CspInstance& c, const Key& s,
                        const std::vector<std::pair<int, int>>& t, const char* who) {
    c.validate();
    if (c.q != 2)
        throw ValidationError(std::string(who) + ": needs a boolean (q = 2) instance");
    validate_key(s, c.n);
    for (const auto& [i, j] : t)
        if (i < 0 || i >= c.m || j < 0 || j >= c.K)
            throw ValidationError(std::string(who) + ": T entry outside [m] x [K]");
}

}  // namespace

Rational pcal_csp_coeff(const inst::CspInstance& c, const Key& s,
                        const std::vector<std::pair<int, int>>& t) {
    validate_csp_query(c, s, t, "pcal_csp_coeff");
    auto ts = sorted_pairs(t, "pcal_csp_coeff");

    // the y average vanishes unless S is exactly the odd-degree vertex set of H_T
    std::vector<int> deg(c.n, 0);
    for (const auto& [i, j] : ts) deg[c.scopes[i][j]]++;
    for (int v : s) deg[v]++;
    for (int v = 0; v < c.n; ++v)
        if (deg[v] & 1) return Rational(0);

    auto cws = inst::codewords(c.code);
    const long long ncw = static_cast<long long>(cws.size());
    Rational out(1);
    std::size_t a = 0;
    while (a < ts.size()) {
        std::size_t b = a;
        while (b < ts.size() && ts[b].first == ts[a].first) ++b;
        // character sum of the code distribution on this constraint's positions
        long long sum = 0;
        for (const auto& cwv : cws) {
            int par = 0;
            for (std::size_t e = a; e < b; ++e) par ^= cwv[ts[e].second] & 1;
            sum += par ? -1 : 1;
        }
        if (sum == 0) return Rational(0);
        out *= frac(sum, ncw);
        a = b;
    }
    return out;
}

Rational pcal_csp_coeff_brute(const inst::CspInstance& c, const Key& s,
                              const std::vector<std::pair<int, int>>& t) {
    validate_csp_query(c, s, t, "pcal_csp_coeff_brute");
    auto ts = sorted_pairs(t, "pcal_csp_coeff_brute");
    std::vector<int> touched;
    for (const auto& [i, j] : ts)
        if (touched.empty() || touched.back() != i) touched.push_back(i);

    auto cws = inst::codewords(c.code);
    const int ncw = static_cast<int>(cws.size());
    const int nt = static_cast<int>(touched.size());
    check_budget(std::ldexp(1.0, c.n) * std::pow(double(ncw), nt),
                 "csp pseudocalibration brute force");

    long long sum = 0;
    long long den = 1ll << c.n;
    for (int i = 0; i < nt; ++i) den *= ncw;

    for (std::uint64_t ymask = 0; ymask < (1ull << c.n); ++ymask) {
        std::vector<int> pickcw(nt, 0);
        while (true) {
            int neg = 0;
            for (int v : s) neg ^= static_cast<int>(ymask >> v) & 1;
            for (const auto& [i, j] : ts) {
                const int slot =
                    static_cast<int>(std::lower_bound(touched.begin(), touched.end(), i) -
                                     touched.begin());
                neg ^= static_cast<int>(ymask >> c.scopes[i][j]) & 1;  // y factor
                neg ^= cws[pickcw[slot]][j] & 1;                       // z factor
            }
            sum += neg ? -1 : 1;
            int i = nt - 1;
            while (i >= 0 && pickcw[i] == ncw - 1) pickcw[i--] = 0;
            if (i < 0) break;
            ++pickcw[i];
        }
    }
    return frac(sum, den);
}

// --- serialization ----------------------------------------------------------

std::string pe_to_json(const Pseudoexpectation& p) {
    json vals = json::object();
    if (!p.exact.empty()) {
        for (const auto& [k, v] : p.exact) vals[key_to_string(k)] = v.get_str();
    } else {
        for (const auto& [k, v] : p.values) vals[key_to_string(k)] = v;
    }
    json j;
    j["n"] = p.n;
    j["degree"] = p.degree;
    j["values"] = std::move(vals);
    return j.dump() + "\n";
}

Pseudoexpectation pe_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad pseudoexpectation json: ") + e.what());
    }
    Pseudoexpectation p;
    try {
        p.n = j.at("n").get<int>();
        p.degree = j.at("degree").get<int>();
        for (const auto& [ks, item] : j.at("values").items()) {
            Key k = key_from_string(ks);
            validate_key(k, p.n);
            if (item.is_string()) {
                Rational r;
                try {
                    r = Rational(item.get<std::string>(), 10);
                } catch (const std::invalid_argument&) {
                    throw ValidationError("bad pseudoexpectation json: unparsable rational '" +
                                          item.get<std::string>() + "'");
                }
                if (r.get_den() == 0)
                    throw ValidationError("bad pseudoexpectation json: zero denominator");
                r.canonicalize();
                p.exact[k] = r;
                p.values[k] = r.get_d();
            } else {
                p.values[k] = item.get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad pseudoexpectation json: ") + e.what());
    }
    if (!p.exact.empty() && p.exact.size() != p.values.size())
        throw ValidationError("bad pseudoexpectation json: mixed exact and float values");
    return p;
}

}  // namespace soslab::pe
