#pragma once

#include <utility>

#include "lps/gcd.hpp"
#include "lps/mpoly.hpp"

namespace lps {

/// Rational function with gcd(num, den) constant and den normalized.
class RatFunc {
public:
  RatFunc() : den_(1) {}
  RatFunc(MPoly num) : num_(std::move(num)), den_(Rat(1), num_.ring()) {}  // NOLINT
  RatFunc(MPoly num, MPoly den) {
    if (den.is_zero()) throw DivisionByZero();
    MPoly g = gcd(num, den);
    if (!g.is_constant()) {
      num = divide_or_throw(num, g, "rational function");
      den = divide_or_throw(den, g, "rational function");
    }
    Rat unit = den.normalization_unit();
    num_ = num * unit.inverse();
    den_ = den * unit.inverse();
  }

  const MPoly& num() const { return num_; }
  const MPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  RatFunc operator-() const { return RatFunc(-num_, den_, Canonical{}); }
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw DivisionByZero();
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatFunc pow(int e) const {
    if (e >= 0) return RatFunc(num_.pow(e), den_.pow(e));
    return RatFunc(den_.pow(-e), num_.pow(-e));
  }
  /// Quotient rule.
  RatFunc derivative(Var v) const {
    return RatFunc(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
  }

private:
  struct Canonical {};
  RatFunc(MPoly num, MPoly den, Canonical) : num_(std::move(num)), den_(std::move(den)) {}

  MPoly num_;
  MPoly den_;
};

}  // namespace lps
