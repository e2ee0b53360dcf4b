#include "soslab/common.hpp"

#include <cstdlib>
#include <sstream>

namespace soslab {

namespace {
std::uint64_t g_budget = [] {
    if (const char* env = std::getenv("SOSLAB_BUDGET")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0) return static_cast<std::uint64_t>(v);
    }
    return static_cast<std::uint64_t>(1e7);
}();
}  // namespace

std::uint64_t enumeration_budget() { return g_budget; }
void set_enumeration_budget(std::uint64_t b) { g_budget = b; }

void check_budget(double work, const std::string& what) {
    if (work > static_cast<double>(g_budget)) {
        std::ostringstream os;
        os << what << ": enumeration size " << work << " exceeds budget " << g_budget;
        throw BudgetError(os.str());
    }
}

Key key_union(const Key& a, const Key& b) {
    Key out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) { out.push_back(a[i]); ++i; ++j; }
        else if (a[i] < b[j]) out.push_back(a[i++]);
        else out.push_back(b[j++]);
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return out;
}

bool key_subset(const Key& a, const Key& b) {
    std::size_t j = 0;
    for (int v : a) {
        while (j < b.size() && b[j] < v) ++j;
        if (j == b.size() || b[j] != v) return false;
        ++j;
    }
    return true;
}

std::string key_to_string(const Key& k) {
    std::string s = "[";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(k[i]);
    }
    s += ']';
    return s;
}

Key key_from_string(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ValidationError("bad key string: " + s);
    Key out;
    std::string body = s.substr(1, s.size() - 2);
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    validate_key(out, 1 << 30);
    return out;
}

void validate_key(const Key& k, int n) {
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < 0 || k[i] >= n)
            throw ValidationError("key variable out of range: " + key_to_string(k));
        if (i && k[i] <= k[i - 1])
            throw ValidationError("key not sorted/distinct: " + key_to_string(k));
    }
}

bool labeled_union(const LabeledKey& a, const LabeledKey& b, LabeledKey& out) {
    out.vars.clear();
    out.letters.clear();
    std::size_t i = 0, j = 0;
    while (i < a.vars.size() && j < b.vars.size()) {
        if (a.vars[i] == b.vars[j]) {
            if (a.letters[i] != b.letters[j]) return false;  // clash
            out.vars.push_back(a.vars[i]);
            out.letters.push_back(a.letters[i]);
            ++i; ++j;
        } else if (a.vars[i] < b.vars[j]) {
            out.vars.push_back(a.vars[i]);
            out.letters.push_back(a.letters[i]);
            ++i;
        } else {
            out.vars.push_back(b.vars[j]);
            out.letters.push_back(b.letters[j]);
            ++j;
        }
    }
    while (i < a.vars.size()) { out.vars.push_back(a.vars[i]); out.letters.push_back(a.letters[i]); ++i; }
    while (j < b.vars.size()) { out.vars.push_back(b.vars[j]); out.letters.push_back(b.letters[j]); ++j; }
    return true;
}

std::string labeled_key_to_string(const LabeledKey& k) {
    std::string s = "[";
    for (std::size_t i = 0; i < k.vars.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(k.vars[i]);
        s += ':';
        s += std::to_string(k.letters[i]);
    }
    s += ']';
    return s;
}

LabeledKey labeled_key_from_string(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ValidationError("bad labeled key string: " + s);
    LabeledKey out;
    std::string body = s.substr(1, s.size() - 2);
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto pos = tok.find(':');
        if (pos == std::string::npos) throw ValidationError("bad labeled key entry: " + tok);
        out.vars.push_back(std::stoi(tok.substr(0, pos)));
        out.letters.push_back(std::stoi(tok.substr(pos + 1)));
    }
    return out;
}

}  // namespace soslab
