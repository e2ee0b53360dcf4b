#pragma once

// Shared plumbing: error taxonomy, enumeration budget, and the monomial key
// types used across the workbench.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace soslab {

// Bad input (malformed instance, out-of-range parameter, ...).  CLI maps this
// to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver failed to reach the requested tolerance.  CLI exit code 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// An exhaustive enumeration would exceed the configured budget.  CLI exit
// code 4.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Global cap on enumeration work (number of elementary steps).  Defaults to
// 1e7 and can be overridden with the SOSLAB_BUDGET environment variable or
// the --budget CLI flag.
std::uint64_t enumeration_budget();
void set_enumeration_budget(std::uint64_t b);

// Throws BudgetError if `work` exceeds the active budget.
void check_budget(double work, const std::string& what);

// ---------------------------------------------------------------------------
// Monomial keys.
//
// A Key is a sorted vector of distinct variable indices; the empty key is the
// constant monomial.  Variables are dense 0-based ints everywhere.
using Key = std::vector<int>;

// Sorted-merge union of two keys.
Key key_union(const Key& a, const Key& b);

// True if `a` is a subset of `b` (both sorted).
bool key_subset(const Key& a, const Key& b);

// Canonical text form, e.g. "[]", "[2]", "[1,3]".  Used as JSON map keys.
std::string key_to_string(const Key& k);
Key key_from_string(const std::string& s);

// Validates sortedness/distinctness and the variable range [0, n).
void validate_key(const Key& k, int n);

// A labeled key (S, alpha): variables plus one letter per variable, used by
// the CSP relaxation.  vars sorted, letters aligned with vars.
struct LabeledKey {
    Key vars;
    std::vector<int> letters;

    bool operator==(const LabeledKey& o) const {
        return vars == o.vars && letters == o.letters;
    }
    bool operator<(const LabeledKey& o) const {
        if (vars.size() != o.vars.size()) return vars.size() < o.vars.size();
        if (vars != o.vars) return vars < o.vars;
        return letters < o.letters;
    }
};

// Union of two labeled keys.  Returns false if some variable carries two
// different letters (a clash).
bool labeled_union(const LabeledKey& a, const LabeledKey& b, LabeledKey& out);

std::string labeled_key_to_string(const LabeledKey& k);
LabeledKey labeled_key_from_string(const std::string& s);

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = 1469598103934665603ull;
        for (int v : k) { h ^= static_cast<std::size_t>(v) + 0x9e3779b9; h *= 1099511628211ull; }
        return h;
    }
};

struct LabeledKeyHash {
    std::size_t operator()(const LabeledKey& k) const {
        std::size_t h = KeyHash{}(k.vars) * 31;
        for (int v : k.letters) { h ^= static_cast<std::size_t>(v) + 0x7f4a7c15; h *= 1099511628211ull; }
        return h;
    }
};

}  // namespace soslab
