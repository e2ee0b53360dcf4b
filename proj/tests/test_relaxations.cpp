#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "soslab/instances.hpp"
#include "soslab/relaxations.hpp"

using namespace soslab;
using namespace soslab::relax;

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

int brute_max_clique(const inst::Graph& g) {
    auto adj = g.adjacency();
    int best = 0;
    for (int mask = 0; mask < (1 << g.n); ++mask) {
        bool clique = true;
        int size = 0;
        for (int u = 0; u < g.n && clique; ++u) {
            if (!(mask >> u & 1)) continue;
            ++size;
            for (int v = u + 1; v < g.n && clique; ++v)
                if ((mask >> v & 1) && !adj[static_cast<std::size_t>(u) * g.n + v])
                    clique = false;
        }
        if (clique && size > best) best = size;
    }
    return best;
}

int brute_dks(const inst::Graph& g, int k) {
    int best = 0;
    for (int mask = 0; mask < (1 << g.n); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
        int inside = 0;
        for (const auto& [u, v] : g.edges)
            if ((mask >> u & 1) && (mask >> v & 1)) ++inside;
        if (inside > best) best = inside;
    }
    return best;
}

}  // namespace

TEST_CASE("theta matches closed forms") {
    // complete graph -> 1, empty graph -> n, 5-cycle -> sqrt(5)
    inst::Graph empty10;
    empty10.n = 10;
    for (bool dual : {false, true}) {
        CHECK(std::fabs(lovasz_theta(complete(8), 1e-7, dual) - 1.0) < 1e-3);
        CHECK(std::fabs(lovasz_theta(empty10, 1e-7, dual) - 10.0) < 1e-3);
        CHECK(std::fabs(lovasz_theta(cycle(5), 1e-7, dual) - std::sqrt(5.0)) < 1e-3);
    }
}

TEST_CASE("theta primal and dual agree on random graphs") {
    for (std::uint64_t seed : {4u, 9u}) {
        auto g = inst::gnp_half(10, seed);
        double p = lovasz_theta(g, 1e-7, false);
        double d = lovasz_theta(g, 1e-7, true);
        CHECK(std::fabs(p - d) < 2e-3);
    }
}

TEST_CASE("clique level 1 on the triangle and the empty graph") {
    auto rel = build_relaxation(Kind::clique, complete(3), {}, 1);
    CHECK(rel.keys.size() == 4);  // phi + three singletons
    CHECK(rel.keys[0].vars.empty());
    auto res = solve_relaxation(rel, 1e-7);
    CHECK(std::fabs(res.frac - 3.0) < 1e-3);

    inst::Graph empty3;
    empty3.n = 3;
    auto rel0 = build_relaxation(Kind::clique, empty3, {}, 1);
    auto res0 = solve_relaxation(rel0, 1e-7);
    CHECK(std::fabs(res0.frac - 1.0) < 1e-3);
}

TEST_CASE("maxcut_gw values on small graphs") {
    // single edge: 1; even cycle: all edges; 5-cycle: (5/2)(1 + cos(pi/5))
    inst::Graph k2 = complete(2);
    auto r2 = solve_relaxation(build_relaxation(Kind::maxcut_gw, k2, {}, 1), 1e-7);
    CHECK(std::fabs(r2.frac - 1.0) < 1e-4);

    auto r4 = solve_relaxation(build_relaxation(Kind::maxcut_gw, cycle(4), {}, 1), 1e-7);
    CHECK(std::fabs(r4.frac - 4.0) < 1e-3);

    auto rel5 = build_relaxation(Kind::maxcut_gw, cycle(5), {}, 1);
    CHECK(rel5.keys.size() == 5);  // no phi key for the vector program
    auto r5 = solve_relaxation(rel5, 1e-7);
    double want = 2.5 * (1.0 + std::cos(std::acos(-1.0) / 5.0));
    CHECK(std::fabs(r5.frac - want) < 1e-3);
}

TEST_CASE("clique level 1 is bounded by theta of the complement") {
    for (std::uint64_t seed : {7u, 1u, 2u}) {
        auto g = inst::gnp_half(12, seed);
        auto rel = build_relaxation(Kind::clique, g, {}, 1);
        auto res = solve_relaxation(rel, 1e-7);
        double theta = lovasz_theta(inst::complement(g), 1e-7);
        CHECK(res.frac <= theta + 1e-3);
    }
}

TEST_CASE("dks on the 4-cycle at level 2") {
    Params p{{"k", 2.0}};
    auto rel = build_relaxation(Kind::dks, cycle(4), p, 2);
    CHECK(!rel.sdp.eq_rows.empty());  // cardinality rows
    auto res = solve_relaxation(rel, 1e-7);
    CHECK(res.frac >= 1.0 - 1e-3);
    // sum over edges of y_uv <= sum of degrees * y_u / 2 = k on the cycle
    CHECK(res.frac <= 2.0 + 1e-6);
}

TEST_CASE("bisection separates two cliques") {
    inst::Graph g;
    g.n = 8;
    for (int base : {0, 4})
        for (int u = 0; u < 4; ++u)
            for (int v = u + 1; v < 4; ++v) g.edges.push_back({base + u, base + v});
    std::sort(g.edges.begin(), g.edges.end());
    Params p{{"k", 4.0}};
    auto res = solve_relaxation(build_relaxation(Kind::bisection, g, p, 2), 1e-7);
    CHECK(std::fabs(res.frac) <= 1e-2);
}

TEST_CASE("csp objective dominates the best assignment") {
    auto code = inst::xor_code(2, 2);
    auto csp = inst::random_csp(4, 3, 2, code, 11);
    int opt = 0;
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<int> x(4);
        for (int j = 0; j < 4; ++j) x[j] = mask >> j & 1;
        opt = std::max(opt, inst::sat_count(csp, x));
    }
    auto rel = build_relaxation(Kind::csp, csp, {}, 1);
    CHECK(!rel.sdp.eq_rows.empty());  // letter-sum rows
    auto res = solve_relaxation(rel, 1e-7);
    CHECK(res.frac >= opt - 1e-3);
    CHECK(res.frac <= csp.m + 1e-6);

    auto one = inst::random_csp(3, 1, 2, code, 5);
    auto res1 = solve_relaxation(build_relaxation(Kind::csp, one, {}, 1), 1e-7);
    CHECK(std::fabs(res1.frac - 1.0) < 1e-3);
}

TEST_CASE("relaxations dominate integer optima on small instances") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto g = inst::gnp_half(8, seed);
        auto res = solve_relaxation(build_relaxation(Kind::clique, g, {}, 2), 1e-6);
        CHECK(res.frac >= brute_max_clique(g) - 1e-3);
    }
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto g = inst::gnp_half(7, seed);
        Params p{{"k", 3.0}};
        auto res = solve_relaxation(build_relaxation(Kind::dks, g, p, 2), 1e-6);
        CHECK(res.frac >= brute_dks(g, 3) - 1e-3);
    }
}

TEST_CASE("levels tighten monotonically") {
    auto g = inst::gnp_half(8, 3);
    for (Kind kind : {Kind::clique, Kind::mis}) {
        double f1 = solve_relaxation(build_relaxation(kind, g, {}, 1), 1e-7).frac;
        double f2 = solve_relaxation(build_relaxation(kind, g, {}, 2), 1e-7).frac;
        CHECK(f2 <= f1 + 1e-3);
    }
    Params p{{"k", 3.0}};
    double d2 = solve_relaxation(build_relaxation(Kind::dks, cycle(5), p, 2), 1e-7).frac;
    double d3 = solve_relaxation(build_relaxation(Kind::dks, cycle(5), p, 3), 1e-7).frac;
    CHECK(d3 <= d2 + 1e-3);
}

TEST_CASE("solved relaxations verify cleanly and tampering is caught") {
    auto g = inst::gnp_half(8, 1);
    auto rel = build_relaxation(Kind::clique, g, {}, 2);
    auto res = solve_relaxation(rel, 1e-6);
    CHECK(verify_solution(rel, res.solution, 1e-4).empty());

    auto bad = res.solution;
    auto& vec = bad.vectors.at(rel.keys[1]);  // first singleton
    for (double& x : vec) x *= 2.0;
    auto violations = verify_solution(rel, bad, 1e-4);
    REQUIRE(!violations.empty());
    bool consistency = false;
    for (const auto& v : violations)
        if (v.id.rfind("consistency(", 0) == 0) consistency = true;
    CHECK(consistency);
}

TEST_CASE("integer indicator solutions verify exactly") {
    // triangle plus an isolated vertex; indicator of the triangle
    inst::Graph g;
    g.n = 4;
    g.edges = {{0, 1}, {0, 2}, {1, 2}};
    auto rel = build_relaxation(Kind::clique, g, {}, 2);
    SosSolution sol;
    sol.level = 2;
    sol.dim = 1;
    for (const auto& key : rel.keys) {
        bool inside = true;
        for (int u : key.vars)
            if (u == 3) inside = false;
        sol.vectors[key] = {inside ? 1.0 : 0.0};
    }
    CHECK(verify_solution(rel, sol, 1e-9).empty());
    CHECK(std::fabs(objective_value(rel, sol) - 3.0) < 1e-12);
}

TEST_CASE("objective_value matches the solver report") {
    Params p{{"k", 2.0}};
    auto rel = build_relaxation(Kind::dks, cycle(4), p, 2);
    auto res = solve_relaxation(rel, 1e-7);
    CHECK(std::fabs(objective_value(rel, res.solution) - res.frac) < 1e-5);

    auto relc = build_relaxation(Kind::maxcut_gw, cycle(5), {}, 1);
    auto resc = solve_relaxation(relc, 1e-7);
    CHECK(std::fabs(objective_value(relc, resc.solution) - resc.frac) < 1e-5);
}

TEST_CASE("invalid builds are rejected") {
    Params k2{{"k", 2.0}};
    CHECK_THROWS_AS(build_relaxation(Kind::dks, cycle(4), k2, 1), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::bisection, cycle(4), k2, 1), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::dks, cycle(4), {}, 2), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::dks, cycle(4), Params{{"k", 2.5}}, 2),
                    ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::dks, cycle(4), Params{{"k", 9.0}}, 2),
                    ValidationError);

    inst::Hypergraph h;
    h.n = 5;
    h.edges = {Key{0, 1, 2}, Key{3, 4}};
    CHECK_THROWS_AS(build_relaxation(Kind::dksh, h, k2, 1), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::dksh, h, k2, 2), ValidationError);  // arity 3 edge
    CHECK_NOTHROW(build_relaxation(Kind::dksh, h, k2, 3));

    auto csp = inst::random_csp(5, 2, 3, inst::xor_code(2, 3), 1);
    CHECK_THROWS_AS(build_relaxation(Kind::csp, csp, {}, 1), ValidationError);
    CHECK_NOTHROW(build_relaxation(Kind::csp, csp, {}, 2));

    CHECK_THROWS_AS(build_relaxation(Kind::maxcut_gw, cycle(4), {}, 2), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::theta, cycle(4), {}, 2), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::csp, cycle(4), {}, 1), ValidationError);
    CHECK_THROWS_AS(build_relaxation(Kind::clique, h, k2, 2), ValidationError);

    CHECK_THROWS_AS(build_relaxation(Kind::clique, complete(10), Params{{"max_keys", 10.0}}, 2),
                    BudgetError);
}

TEST_CASE("generic programs reproduce the named constructions") {
    // independent set on the 4-cycle as a generic program: maximize sum x_u
    // with x_u x_v = 0 on edges enforced as two opposite inequalities
    auto g = cycle(4);
    GenericProgram prog;
    prog.n = 4;
    prog.objective = poly::MultilinearPoly(4);
    for (int u = 0; u < 4; ++u) prog.objective.add_term(Key{u}, 1.0);
    for (const auto& [u, v] : g.edges) {
        poly::MultilinearPoly up(4), down(4);
        up.add_term(Key{u, v}, 1.0);
        down.add_term(Key{u, v}, -1.0);
        prog.constraints.push_back(up);
        prog.constraints.push_back(down);
    }
    auto res = solve_relaxation(build_relaxation(prog, {}, 2), 1e-7);
    auto mis = solve_relaxation(build_relaxation(Kind::mis, g, {}, 2), 1e-7);
    CHECK(std::fabs(res.frac - mis.frac) < 2e-3);
    CHECK(std::fabs(mis.frac - 2.0) < 1e-3);  // alternate vertices
}

TEST_CASE("relaxation json round trips byte for byte") {
    Params p{{"k", 2.0}};
    auto rel = build_relaxation(Kind::dks, cycle(4), p, 2);
    auto text = relaxation_to_json(rel);
    auto back = relaxation_from_json(text);
    CHECK(back.kind == rel.kind);
    CHECK(back.level == rel.level);
    CHECK(back.keys == rel.keys);
    CHECK(back.key_index == rel.key_index);
    CHECK(relaxation_to_json(back) == text);

    auto code = inst::xor_code(2, 2);
    auto csp = inst::random_csp(4, 2, 2, code, 3);
    auto relc = build_relaxation(Kind::csp, csp, {}, 1);
    auto textc = relaxation_to_json(relc);
    CHECK(relaxation_to_json(relaxation_from_json(textc)) == textc);

    CHECK_THROWS_AS(relaxation_from_json("{\"kind\": \"dks\"}"), ValidationError);
    CHECK_THROWS_AS(relaxation_from_json("not json"), ValidationError);
}

TEST_CASE("solution json round trips") {
    auto rel = build_relaxation(Kind::clique, complete(3), {}, 1);
    auto res = solve_relaxation(rel, 1e-7);
    auto text = solution_to_json(res.solution);
    auto back = solution_from_json(text);
    CHECK(back.level == res.solution.level);
    CHECK(back.dim == res.solution.dim);
    CHECK(back.vectors == res.solution.vectors);  // dump uses shortest round-trip floats
    CHECK(solution_to_json(back) == text);
}

TEST_CASE("kind names round trip") {
    for (Kind k : {Kind::generic, Kind::clique, Kind::mis, Kind::csp, Kind::dks, Kind::dksh,
                   Kind::bisection, Kind::ssbve, Kind::maxcut_gw, Kind::theta})
        CHECK(kind_from_name(kind_name(k)) == k);
    CHECK_THROWS_AS(kind_from_name("nope"), ValidationError);
}

TEST_CASE("ssbve picks the smallest right side") {
    // left vertices each force their right neighbors; l = 2 of 3 left
    inst::BipartiteGraph g;
    g.left = {"a", "b", "c"};
    g.right = {"x", "y"};
    g.edges = {{0, 0}, {1, 0}, {2, 0}, {2, 1}};  // c also touches y
    Params p{{"l", 2.0}};
    auto rel = build_relaxation(Kind::ssbve, g, p, 2);
    CHECK(!rel.sdp.ineq_rows.empty());
    auto res = solve_relaxation(rel, 1e-7);
    // picking {a, b} needs only x; relaxation can't beat picking one vertex
    CHECK(res.frac <= 1.0 + 1e-3);
    CHECK(res.frac >= 0.5 - 1e-3);
}
