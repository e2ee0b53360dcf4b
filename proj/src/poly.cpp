#include "soslab/poly.hpp"

#include <cmath>

namespace soslab::poly {

Rational binomial(long n, long k) {
    if (k < 0 || k > n) return Rational(0);
    mpz_class num = 1;
    for (long i = 0; i < k; ++i) num *= (n - i);
    mpz_class den = 1;
    for (long i = 2; i <= k; ++i) den *= i;
    return Rational(num / den);
}

void MultilinearPoly::add_term(const Key& k, double c) {
    validate_key(k, n_);
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        if (c != 0.0) terms_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

int MultilinearPoly::degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, static_cast<int>(k.size()));
    return d;
}

double MultilinearPoly::evaluate(const std::vector<int>& assignment) const {
    if (static_cast<int>(assignment.size()) != n_)
        throw ValidationError("evaluate: assignment length mismatch");
    double total = 0.0;
    for (const auto& [k, c] : terms_) {
        bool on = true;
        for (int v : k)
            if (assignment[v] == 0) { on = false; break; }
        if (on) total += c;
    }
    return total;
}

MultilinearPoly MultilinearPoly::operator+(const MultilinearPoly& o) const {
    MultilinearPoly out(std::max(n_, o.n_));
    out.terms_ = terms_;
    for (const auto& [k, c] : o.terms_) {
        auto it = out.terms_.find(k);
        if (it == out.terms_.end()) out.terms_.emplace(k, c);
        else {
            it->second += c;
            if (it->second == 0.0) out.terms_.erase(it);
        }
    }
    return out;
}

MultilinearPoly MultilinearPoly::operator*(const MultilinearPoly& o) const {
    MultilinearPoly out(std::max(n_, o.n_));
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_)
            out.add_term(key_union(ka, kb), ca * cb);
    return out;
}

MultilinearPoly multilinearize(const std::vector<RawTerm>& raw, int n) {
    MultilinearPoly out(n);
    for (const auto& [exps, coef] : raw) {
        if (static_cast<int>(exps.size()) > n)
            throw ValidationError("multilinearize: exponent vector longer than n");
        Key k;
        for (std::size_t v = 0; v < exps.size(); ++v) {
            if (exps[v] < 0) throw ValidationError("multilinearize: negative exponent");
            if (exps[v] > 0) k.push_back(static_cast<int>(v));
        }
        out.add_term(k, coef);
    }
    return out;
}

double evaluate_raw(const std::vector<RawTerm>& raw, const std::vector<int>& assignment) {
    double total = 0.0;
    for (const auto& [exps, coef] : raw) {
        double term = coef;
        for (std::size_t v = 0; v < exps.size(); ++v)
            term *= std::pow(static_cast<double>(assignment[v]), exps[v]);
        total += term;
    }
    return total;
}

}  // namespace soslab::poly
