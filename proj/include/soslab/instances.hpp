#pragma once

// Seeded instance generators (graphs, planted models, codes, CSPs), the
// factor-graph constructions, and the plausibility checker.
//
// Every generator is a pure function of (parameters, seed).  Randomness is
// split one substream per logical object -- per vertex pair, per constraint
// -- so instances are reproducible bit for bit and unrelated draws never
// share a stream.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soslab/common.hpp"
#include "soslab/rng.hpp"

namespace soslab::inst {

struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted, no duplicates

    void validate() const;
    std::vector<char> adjacency() const;  // n*n, 1 iff edge
    std::vector<int> degrees() const;
};

struct BipartiteGraph {
    std::vector<std::string> left;
    std::vector<std::string> right;
    std::vector<std::pair<int, int>> edges;  // (left index, right index)

    void validate() const;
};

struct Hypergraph {
    int n = 0;
    std::vector<Key> edges;  // nonempty sorted vertex sets

    void validate() const;
};

struct LinearCode {
    int q = 0;       // prime field size
    int length = 0;  // block length K
    std::vector<std::vector<int>> generator;  // length x dim, entries in [0,q)

    int dim() const { return generator.empty() ? 0 : static_cast<int>(generator[0].size()); }
    void validate() const;  // includes the rank check
};

struct CspInstance {
    int n = 0, m = 0, K = 0, q = 0;
    std::vector<Key> scopes;                // m sorted K-subsets of [n]
    std::vector<std::vector<int>> shifts;   // m vectors in F_q^K, aligned with scope order
    LinearCode code;                        // block length K

    void validate() const;
};

struct FactorGraph {
    int m = 0, n = 0, K = 0;
    std::vector<std::pair<int, int>> edges;  // (constraint i, variable j)

    void validate() const;
};

struct SpectralStats {
    std::vector<double> adjacency;  // normalized adjacency, descending
    std::vector<double> laplacian;  // normalized Laplacian, ascending
};

// --- generators -----------------------------------------------------------

Graph gnp_half(int n, std::uint64_t seed);

// Returns the graph and the planted vertex set (sorted).  With k <= 1 the
// output equals gnp_half(n, seed) exactly; planted sets for growing k are
// nested for a fixed seed.
std::pair<Graph, std::vector<int>> planted_clique(int n, int k, std::uint64_t seed);

// Punctured Reed-Solomon style code: length q-1, dimension D-1, generator
// entry (i,j) = g^{ij} for the smallest primitive root g (0-based i,j).
LinearCode vandermonde_code(int q, int d);

// Parity-check style code {x : sum x_i = 0 mod q}: length k, dimension k-1.
LinearCode xor_code(int q, int k);

// All q^dim codewords, message order lexicographic (last coordinate fastest).
std::vector<std::vector<int>> codewords(const LinearCode& code);

bool check_kwise_uniform(const LinearCode& code, int t);

CspInstance random_csp(int n, int m, int k, const LinearCode& code, std::uint64_t seed);

// Number of constraints x satisfies: scope values minus shift lands in the code.
int sat_count(const CspInstance& inst, const std::vector<int>& x);

FactorGraph factor_graph(const CspInstance& inst);

// beta <= 0 means the default Delta = ceil(m/n).
BipartiteGraph label_extended_graph(const CspInstance& inst, int beta = 0);

// Complement graph: (u,v) is an edge iff u != v and (u,v) is not in g.
Graph complement(const Graph& g);

// --- analysis -------------------------------------------------------------

struct PlausibilityReport {
    bool holds = true;
    std::vector<int> witness;  // violating constraint set when holds is false
};

// Checks v >= K c - ((tau - zeta)/2) c for every constraint subset of size
// c <= floor(2 eta n).  Throws BudgetError when the subset space is too big
// to decide.
PlausibilityReport check_plausibility(const FactorGraph& fg, int tau, double zeta, double eta);

// Test oracle: literal enumeration over subgraphs in which every included
// constraint keeps between tau and K of its edges.
PlausibilityReport plausibility_oracle(const FactorGraph& fg, int tau, double zeta, double eta);

SpectralStats spectral_stats(const Graph& g);

// --- serialization ----------------------------------------------------------
// Graph {"n","edges"}; CSP {"n","m","K","q","scopes","shifts","generator"};
// hypergraph {"n","edges"}; bipartite {"left","right","edges"}.  Compact
// single-line JSON with a trailing newline, like the relaxation formats.

std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

std::string csp_to_json(const CspInstance& c);
CspInstance csp_from_json(const std::string& text);

std::string hypergraph_to_json(const Hypergraph& h);
Hypergraph hypergraph_from_json(const std::string& text);

std::string bipartite_to_json(const BipartiteGraph& b);
BipartiteGraph bipartite_from_json(const std::string& text);

// --- modular helpers (shared with reductions/pseudo) -----------------------

long long power_mod(long long base, long long exp, long long mod);
bool is_prime(int q);
int smallest_primitive_root(int q);
int matrix_rank_mod(std::vector<std::vector<int>> rows, int q);

}  // namespace soslab::inst
