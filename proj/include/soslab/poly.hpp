#pragma once

// Multilinear polynomials over {0,1}^n and the exact-rational helpers that
// back the pseudocalibration code.

#include <gmpxx.h>

#include <map>
#include <utility>
#include <vector>

#include "soslab/common.hpp"

namespace soslab::poly {

using Rational = mpq_class;

// Exact binomial coefficient as an integer rational.
Rational binomial(long n, long k);

// A polynomial in its raw user-supplied form: (exponent vector, coefficient)
// terms, exponents >= 0, one slot per variable.
using RawTerm = std::pair<std::vector<int>, double>;

// Multilinear polynomial: sorted monomial key -> coefficient.  Zero
// coefficients are dropped on construction.
class MultilinearPoly {
  public:
    MultilinearPoly() = default;
    explicit MultilinearPoly(int n) : n_(n) {}

    int n() const { return n_; }
    const std::map<Key, double>& terms() const { return terms_; }
    double coeff(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? 0.0 : it->second;
    }

    void add_term(const Key& k, double c);
    int degree() const;

    double evaluate(const std::vector<int>& assignment) const;

    MultilinearPoly operator+(const MultilinearPoly& o) const;
    MultilinearPoly operator*(const MultilinearPoly& o) const;  // x_i^2 -> x_i

  private:
    int n_ = 0;
    std::map<Key, double> terms_;
};

// Reduces a raw term list modulo x_i^2 = x_i.  Rejects negative exponents
// and out-of-range variables.
MultilinearPoly multilinearize(const std::vector<RawTerm>& raw, int n);

// Evaluation of the raw (un-reduced) form, used as the test oracle for
// multilinearize.
double evaluate_raw(const std::vector<RawTerm>& raw, const std::vector<int>& assignment);

}  // namespace soslab::poly
