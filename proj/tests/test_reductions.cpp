#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "soslab/instances.hpp"
#include "soslab/reductions.hpp"
#include "soslab/relaxations.hpp"

using namespace soslab;
using namespace soslab::reduce;

namespace {

inst::Graph cycle(int n) {
    inst::Graph g;
    g.n = n;
    for (int u = 0; u + 1 < n; ++u) g.edges.push_back({u, u + 1});
    if (n > 2) g.edges.push_back({0, n - 1});
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

inst::Graph complete(int n) {
    inst::Graph g;
    g.n = n;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.edges.push_back({u, v});
    return g;
}

// satisfiable 2-XOR instances over the parity code {00, 11}; seeds were
// screened so the brute-force optimum equals m
inst::CspInstance tiny_csp(int n, int m, std::uint64_t seed) {
    return inst::random_csp(n, m, 2, inst::xor_code(2, 2), seed);
}

double worst_violation(const std::vector<relax::Violation>& v) {
    double w = 0.0;
    for (const auto& x : v) w = std::max(w, x.magnitude);
    return w;
}

}  // namespace

TEST_CASE("csp_to_dks builds the label-extended instance") {
    auto c = tiny_csp(4, 2, 1);
    auto [red, none] = csp_to_dks(c);
    CHECK(!none.has_value());
    CHECK(red.k == 2 * c.m);
    CHECK(red.delta == 1);  // ceil(m/n)
    // vertices: m*|C| assignment vertices then n*q*delta labeled copies
    const int ncw = 2;
    CHECK(red.bip.left.size() == static_cast<std::size_t>(c.m * ncw));
    CHECK(red.bip.right.size() == static_cast<std::size_t>(c.n * c.q * red.delta));
    CHECK(red.graph.n == static_cast<int>(red.bip.left.size() + red.bip.right.size()));
    // every assignment vertex keeps K*delta edges
    CHECK(red.graph.edges.size() == static_cast<std::size_t>(c.m * ncw * c.K * red.delta));
    for (const auto& [u, v] : red.graph.edges) {
        CHECK(u < static_cast<int>(red.bip.left.size()));
        CHECK(v >= static_cast<int>(red.bip.left.size()));
    }
}

TEST_CASE("lemma mapping reaches delta*m*K on a complete source") {
    auto c = tiny_csp(4, 2, 1);
    REQUIRE(brute_force_opt(c) == c.m);
    auto rel = relax::build_relaxation(relax::Kind::csp, c, {}, 4);
    auto res = relax::solve_relaxation(rel, 1e-7);
    CHECK(res.frac == doctest::Approx(2.0).epsilon(1e-5));

    auto [red, mapped] = csp_to_dks(c, res.solution);
    REQUIRE(mapped.has_value());
    CHECK(mapped->level == 2);  // floor(r/K)
    CHECK(mapped->vectors.size() == 79u);  // all subsets of 12 vertices up to size 2

    auto drel = relax::build_relaxation(relax::Kind::dks, red.graph,
                                        {{"k", double(red.k)}}, mapped->level);
    const double want = double(red.delta * c.m * c.K);
    CHECK(relax::objective_value(drel, *mapped) == doctest::Approx(want).epsilon(1e-3));

    // phi maps to the source phi vector
    auto phi = mapped->vectors.at(LabeledKey{});
    double n2 = 0.0;
    for (double x : phi) n2 += x * x;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-6));

    // two copies of variable 0 with different letters are inconsistent
    const int base = static_cast<int>(red.bip.left.size());
    const auto& zero = mapped->vectors.at(LabeledKey{Key{base, base + red.delta}, {}});
    for (double x : zero) CHECK(x == 0.0);

    // a labeled copy alone carries the source (variable, letter) vector
    const auto& single = mapped->vectors.at(LabeledKey{Key{base}, {}});
    const auto& src = res.solution.vectors.at(LabeledKey{Key{0}, {0}});
    REQUIRE(single.size() == src.size());
    for (std::size_t i = 0; i < single.size(); ++i) CHECK(single[i] == src[i]);
}

TEST_CASE("mapped dks solutions are feasible when n*delta = m") {
    auto c = tiny_csp(2, 2, 4);
    REQUIRE(brute_force_opt(c) == 2);
    auto rel = relax::build_relaxation(relax::Kind::csp, c, {}, 4);
    auto res = relax::solve_relaxation(rel, 1e-7);

    auto [red, mapped] = csp_to_dks(c, res.solution);
    REQUIRE(mapped.has_value());
    CHECK(c.n * red.delta == c.m);  // cardinality rows need this balance
    auto drel = relax::build_relaxation(relax::Kind::dks, red.graph,
                                        {{"k", double(red.k)}}, mapped->level);
    CHECK(verify_solution(drel, *mapped, 1e-3).empty());
    const double obj = relax::objective_value(drel, *mapped);
    CHECK(obj == doctest::Approx(4.0).epsilon(1e-3));

    // gap sandwich: feasible value <= solved relaxation, oracle <= relaxation
    auto dres = relax::solve_relaxation(drel, 1e-7);
    const long long opt = brute_force_opt(relax::Kind::dks, red.graph, red.k);
    CHECK(opt == 4);
    CHECK(obj <= dres.frac + 1e-3);
    CHECK(double(opt) <= dres.frac + 1e-3);
}

TEST_CASE("csp_to_dks polices solution levels") {
    auto c = tiny_csp(4, 2, 1);
    relax::SosSolution shallow;
    shallow.level = 1;  // below K
    shallow.dim = 1;
    CHECK_THROWS_AS((void)csp_to_dks(c, shallow), ValidationError);

    auto rel = relax::build_relaxation(relax::Kind::csp, c, {}, 4);
    auto res = relax::solve_relaxation(rel, 1e-5);
    CHECK_THROWS_AS((void)csp_to_dks(c, res.solution, 0, 5), ValidationError);
}

TEST_CASE("dks_to_dksh powers the edge set") {
    auto c4 = cycle(4);

    auto same = dks_to_dksh(c4, 1);
    CHECK(same.n == c4.n);
    REQUIRE(same.edges.size() == c4.edges.size());
    std::set<Key> want;
    for (const auto& [u, v] : c4.edges) want.insert(Key{u, v});
    for (const Key& e : same.edges) CHECK(want.count(e) == 1);

    // unions of two cycle edges: the 4 edges, 4 paths, and the full vertex set
    auto sq = dks_to_dksh(c4, 2);
    CHECK(sq.edges.size() == 9u);
    int by_size[5] = {0, 0, 0, 0, 0};
    for (const Key& e : sq.edges) {
        REQUIRE(e.size() >= 2u);
        REQUIRE(e.size() <= 4u);
        ++by_size[e.size()];
    }
    CHECK(by_size[2] == 4);
    CHECK(by_size[3] == 4);
    CHECK(by_size[4] == 1);

    for (std::uint64_t seed : {7u, 8u, 9u}) {
        auto g = inst::gnp_half(8, seed);
        if (g.edges.empty()) continue;
        auto h = dks_to_dksh(g, 2);
        CHECK(h.edges.size() >= g.edges.size());
    }

    CHECK_THROWS_AS((void)dks_to_dksh(c4, 0), ValidationError);
    CHECK_THROWS_AS((void)dks_to_dksh(complete(10), 4), BudgetError);
}

TEST_CASE("hyper_tuple_bound is exact on indicator solutions") {
    // K_4 with the clique {0,1,2} selected: every norm is 0 or 1
    auto k4 = complete(4);
    relax::SosSolution ind;
    ind.level = 4;
    ind.dim = 1;
    for (int mask = 0; mask < 16; ++mask) {
        Key s;
        for (int v = 0; v < 4; ++v)
            if (mask >> v & 1) s.push_back(v);
        const bool in = (mask & ~0b0111) == 0;
        ind.vectors[LabeledKey{s, {}}] = {in ? 1.0 : 0.0};
    }
    auto [l1, r1] = hyper_tuple_bound(ind, k4.edges, 1);
    CHECK(l1 == 9.0);  // 3 induced edges, squared
    CHECK(r1 == 9.0);
    auto [l2, r2] = hyper_tuple_bound(ind, k4.edges, 2);
    CHECK(l2 == 81.0);
    CHECK(r2 == 81.0);
}

TEST_CASE("hyper_tuple_bound on a solved dks relaxation") {
    auto k4 = complete(4);
    auto rel = relax::build_relaxation(relax::Kind::dks, k4, {{"k", 3}}, 4);
    auto res = relax::solve_relaxation(rel, 1e-7);
    CHECK(res.frac == doctest::Approx(3.0).epsilon(1e-4));

    auto [l0, r0] = hyper_tuple_bound(res.solution, k4.edges, 0);
    CHECK(l0 == r0);  // the p = 0 sum is FRAC itself
    CHECK(l0 == doctest::Approx(3.0).epsilon(1e-4));

    auto [l1, r1] = hyper_tuple_bound(res.solution, k4.edges, 1);
    CHECK(l1 >= r1 - 1e-3);

    relax::SosSolution bare;
    bare.level = 2;
    bare.dim = 1;
    bare.vectors[LabeledKey{}] = {1.0};
    CHECK_THROWS_AS((void)hyper_tuple_bound(bare, k4.edges, 1), ValidationError);
    CHECK_THROWS_AS((void)hyper_tuple_bound(res.solution, k4.edges, -1), ValidationError);
    CHECK_THROWS_AS((void)hyper_tuple_bound(res.solution, k4.edges, 21), ValidationError);
    CHECK_THROWS_AS((void)hyper_tuple_bound(res.solution, complete(10).edges, 10),
                    BudgetError);
}

TEST_CASE("csp_to_ssbve subdivides and keeps the budget l = delta*m*K") {
    auto c = tiny_csp(4, 2, 1);
    auto [red, none] = csp_to_ssbve(c);
    CHECK(!none.has_value());
    CHECK(red.l == red.delta * c.m * c.K);
    CHECK(red.bip.left.size() == red.base.edges.size());
    CHECK(red.bip.right.size() == static_cast<std::size_t>(red.base.n));
    // each subdivision vertex joins exactly its two endpoints
    CHECK(red.bip.edges.size() == 2 * red.base.edges.size());
}

TEST_CASE("ssbve mapping verifies on a complete source") {
    auto c = tiny_csp(2, 2, 4);
    auto rel = relax::build_relaxation(relax::Kind::csp, c, {}, 20);
    auto res = relax::solve_relaxation(rel, 1e-7);

    auto [dred, dks_sol] = csp_to_dks(c, res.solution, 0, 10);
    REQUIRE(dks_sol.has_value());
    CHECK(dks_sol->level == 10);

    auto [red, mapped] = csp_to_ssbve(c, dks_sol, res.solution);
    REQUIRE(mapped.has_value());
    CHECK(mapped->level == 1);  // r'/2 - 4

    auto phi = mapped->vectors.at(LabeledKey{});
    double n2 = 0.0;
    for (double x : phi) n2 += x * x;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-6));

    auto srel = relax::build_relaxation(relax::Kind::ssbve, red.bip,
                                        {{"l", double(red.l)}}, mapped->level);
    auto bad = verify_solution(srel, *mapped, 1e-3);
    CHECK(bad.empty());
    CHECK(worst_violation(bad) <= 1e-3);
    const double obj = relax::objective_value(srel, *mapped);
    CHECK(obj == doctest::Approx(2.0 * c.m).epsilon(1e-3));

    // minimization sandwich: relaxation value under both the mapped point
    // and the exhaustive optimum
    auto sres = relax::solve_relaxation(srel, 1e-7);
    const long long opt = brute_force_opt(relax::Kind::ssbve, red.bip, red.l);
    CHECK(opt == 4);
    CHECK(sres.frac <= obj + 1e-3);
    CHECK(sres.frac <= double(opt) + 1e-3);
}

TEST_CASE("csp_to_ssbve polices levels and pairing") {
    auto c = tiny_csp(2, 2, 4);
    relax::SosSolution shallow;
    shallow.level = 8;  // r'/2 - 4 would be 0
    shallow.dim = 1;
    CHECK_THROWS_AS((void)csp_to_ssbve(c, shallow), ValidationError);

    auto rel = relax::build_relaxation(relax::Kind::csp, c, {}, 20);
    auto res = relax::solve_relaxation(rel, 1e-6);
    auto [dred, dks_sol] = csp_to_dks(c, res.solution, 0, 10);
    auto scaled = res.solution;
    for (auto& [k, v] : scaled.vectors)
        for (double& x : v) x *= 1.5;
    CHECK_THROWS_AS((void)csp_to_ssbve(c, dks_sol, scaled), ValidationError);
}

TEST_CASE("brute_force_opt matches hand counts") {
    CHECK(brute_force_opt(relax::Kind::clique, complete(4)) == 4);
    CHECK(brute_force_opt(relax::Kind::mis, cycle(4)) == 2);
    CHECK(brute_force_opt(relax::Kind::dks, cycle(4), 3) == 2);
    CHECK(brute_force_opt(relax::Kind::maxcut_gw, cycle(5)) == 4);

    // two disjoint K_4s split cleanly
    inst::Graph g2 = complete(4);
    g2.n = 8;
    for (int u = 4; u < 8; ++u)
        for (int v = u + 1; v < 8; ++v) g2.edges.push_back({u, v});
    CHECK(brute_force_opt(relax::Kind::bisection, g2, 4) == 0);

    CHECK(brute_force_opt(relax::Kind::dksh, dks_to_dksh(cycle(4), 2), 3) == 3);

    inst::BipartiteGraph b;
    b.left = {"a", "b", "c"};
    b.right = {"x", "y", "z"};
    b.edges = {{0, 0}, {1, 0}, {2, 1}, {2, 2}};
    CHECK(brute_force_opt(relax::Kind::ssbve, b, 2) == 1);

    // odd-cycle 2-XOR: x0+x1 = x1+x2 = x0+x2 = 1 caps at two clauses
    inst::CspInstance tri;
    tri.n = 3;
    tri.m = 3;
    tri.K = 2;
    tri.q = 2;
    tri.scopes = {{0, 1}, {1, 2}, {0, 2}};
    tri.shifts = {{0, 1}, {0, 1}, {0, 1}};
    tri.code = inst::xor_code(2, 2);
    CHECK(brute_force_opt(tri) == 2);
}

TEST_CASE("brute_force_opt rejects misuse and oversized spaces") {
    inst::Graph big;
    big.n = 40;
    CHECK_THROWS_AS((void)brute_force_opt(relax::Kind::clique, big), BudgetError);
    CHECK_THROWS_AS((void)brute_force_opt(relax::Kind::theta, cycle(4)), ValidationError);
    CHECK_THROWS_AS((void)brute_force_opt(relax::Kind::dks, cycle(4), 9), ValidationError);
    CHECK_THROWS_AS((void)brute_force_opt(relax::Kind::clique, dks_to_dksh(cycle(4), 1), 2),
                    ValidationError);
    inst::BipartiteGraph b;
    b.left = {"a"};
    b.right = {"x"};
    b.edges = {{0, 0}};
    CHECK_THROWS_AS((void)brute_force_opt(relax::Kind::dks, b, 1), ValidationError);

    inst::CspInstance wide = tiny_csp(30, 2, 1);
    CHECK_THROWS_AS((void)brute_force_opt(wide), BudgetError);
}
