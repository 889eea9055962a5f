#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lps/errors.hpp"
#include "lps/monomial.hpp"
#include "lps/rat.hpp"

namespace lps {

struct Term {
  Monomial mono;
  Rat coeff;
  bool operator==(const Term&) const = default;
};

/// Sparse multivariate polynomial over Q in the variables {x, y, z, w}.
///
/// Terms are kept sorted in descending grlex order with no zero
/// coefficients, so the first term is the leading term. The ring records
/// the declared variable set; arithmetic works in the union of the operand
/// rings. Equality compares terms only.
class MPoly {
public:
  MPoly() = default;
  explicit MPoly(Ring ring) : ring_(ring) {}
  MPoly(const Rat& c, Ring ring = {}) : ring_(ring) {  // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.push_back({Monomial{}, c});
  }
  MPoly(long c) : MPoly(Rat(c)) {}  // NOLINT(google-explicit-constructor)
  MPoly(int c) : MPoly(Rat(c)) {}   // NOLINT(google-explicit-constructor)

  static MPoly var(Var v, Ring ring = {}) {
    MPoly p(ring | Ring{v});
    p.terms_.push_back({Monomial::var(v), Rat(1)});
    return p;
  }

  static MPoly monomial(Monomial m, const Rat& c = Rat(1), Ring ring = {}) {
    MPoly p(ring | m.support());
    if (!c.is_zero()) p.terms_.push_back({m, c});
    return p;
  }

  /// Builds from unsorted terms; duplicates are summed and zeros dropped.
  static MPoly from_terms(std::vector<Term> terms, Ring ring = {}) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.mono > b.mono; });
    MPoly p(ring);
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
        p.terms_.back().coeff += t.coeff;
      } else {
        if (!p.terms_.empty() && p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
        p.terms_.push_back(std::move(t));
      }
    }
    if (!p.terms_.empty() && p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
    for (const auto& t : p.terms_) p.ring_ = p.ring_ | t.mono.support();
    return p;
  }

  Ring ring() const { return ring_; }
  MPoly with_ring(Ring r) const {
    MPoly p = *this;
    p.ring_ = p.ring_ | r;
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  bool is_one() const { return is_constant() && !is_zero() && terms_[0].coeff.is_one(); }

  /// Constant term (zero if absent).
  Rat constant_value() const {
    if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
    return Rat(0);
  }

  const Term& leading_term() const { return terms_.front(); }
  Monomial leading_monomial() const { return terms_.front().mono; }
  const Rat& leading_coeff() const { return terms_.front().coeff; }

  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.front().mono.degree(); }

  int degree(Var v) const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& t : terms_) d = std::max(d, t.mono.exponent(v));
    return d;
  }

  /// Variables that actually occur.
  Ring variables() const {
    Ring r;
    for (const auto& t : terms_) r = r | t.mono.support();
    return r;
  }

  Rat coeff(Monomial m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, Monomial key) { return t.mono > key; });
    if (it != terms_.end() && it->mono == m) return it->coeff;
    return Rat(0);
  }

  friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

  MPoly operator-() const {
    MPoly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend MPoly operator+(const MPoly& a, const MPoly& b) { return merge(a, b, false); }
  friend MPoly operator-(const MPoly& a, const MPoly& b) { return merge(a, b, true); }
  MPoly& operator+=(const MPoly& b) { return *this = *this + b; }
  MPoly& operator-=(const MPoly& b) { return *this = *this - b; }

  friend MPoly operator*(const MPoly& a, const Rat& c) {
    if (c.is_zero()) return MPoly(a.ring_);
    MPoly r = a;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
  }
  friend MPoly operator*(const Rat& c, const MPoly& a) { return a * c; }

  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    Ring ring = a.ring_ | b.ring_;
    if (a.is_zero() || b.is_zero()) return MPoly(ring);
    if (a.size() == 1 && a.terms_[0].mono.is_one()) return (b * a.terms_[0].coeff).with_ring(ring);
    if (b.size() == 1 && b.terms_[0].mono.is_one()) return (a * b.terms_[0].coeff).with_ring(ring);
    std::unordered_map<Monomial, mpq_class> acc;
    acc.reserve(a.size() * b.size());
    mpq_class tmp;
    for (const auto& ta : a.terms_) {
      for (const auto& tb : b.terms_) {
        mpq_mul(tmp.get_mpq_t(), ta.coeff.raw().get_mpq_t(), tb.coeff.raw().get_mpq_t());
        acc[ta.mono * tb.mono] += tmp;
      }
    }
    MPoly r(ring);
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (sgn(c) != 0) r.terms_.push_back({m, Rat(c)});
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& x, const Term& y) { return x.mono > y.mono; });
    return r;
  }
  MPoly& operator*=(const MPoly& b) { return *this = *this * b; }

  MPoly mul_monomial(Monomial m, const Rat& c = Rat(1)) const {
    if (c.is_zero()) return MPoly(ring_);
    MPoly r(ring_ | m.support());
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back({t.mono * m, t.coeff * c});
    return r;
  }

  MPoly pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative exponent for a polynomial; use RatFunc");
    MPoly result(Rat(1), ring_);
    MPoly base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  MPoly derivative(Var v) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      int e = t.mono.exponent(v);
      if (e == 0) continue;
      out.push_back({Monomial::var(v).quotient_of(t.mono), t.coeff * Rat(e)});
    }
    // Differentiation in one variable preserves the relative grlex order.
    MPoly r(ring_);
    r.terms_ = std::move(out);
    return r;
  }

  /// Exact value at a rational point given per variable (unused entries ignored).
  Rat evaluate(const std::array<Rat, kMaxVars>& point) const {
    Rat sum(0);
    for (const auto& t : terms_) {
      Rat v = t.coeff;
      for (int i = 0; i < kMaxVars; ++i) {
        int e = t.mono.exponent(var_from_index(i));
        if (e == 0) continue;
        mpq_class pw;
        mpz_pow_ui(pw.get_num_mpz_t(), point[i].num().get_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(pw.get_den_mpz_t(), point[i].den().get_mpz_t(), static_cast<unsigned long>(e));
        v *= Rat(pw);
      }
      sum += v;
    }
    return sum;
  }

  /// Composition: each bound variable is replaced by its image.
  MPoly substitute(const std::map<Var, MPoly>& bindings) const {
    if (bindings.empty()) return *this;
    Ring ring = ring_;
    for (const auto& [v, p] : bindings) ring = ring | p.ring();
    std::map<std::pair<int, int>, MPoly> power_cache;
    auto power = [&](Var v, int e) -> const MPoly& {
      auto key = std::make_pair(var_index(v), e);
      auto it = power_cache.find(key);
      if (it != power_cache.end()) return it->second;
      return power_cache.emplace(key, bindings.at(v).pow(e)).first->second;
    };
    std::vector<Term> direct;
    MPoly result(ring);
    for (const auto& t : terms_) {
      std::array<int, kMaxVars> keep = t.mono.exponents();
      MPoly factor(t.coeff, ring);
      bool bound = false;
      for (const auto& [v, img] : bindings) {
        int e = keep[var_index(v)];
        if (e == 0) continue;
        keep[var_index(v)] = 0;
        factor *= power(v, e);
        bound = true;
      }
      Monomial rest = Monomial::from_exponents(keep);
      if (!bound) {
        direct.push_back({rest, t.coeff});
      } else {
        result += factor.mul_monomial(rest);
      }
    }
    if (!direct.empty()) result += from_terms(std::move(direct), ring);
    return result;
  }

  /// Positive rational c such that p / c has coprime integer coefficients.
  Rat content() const {
    if (terms_.empty()) return Rat(0);
    Int g(0), l(1);
    for (const auto& t : terms_) {
      g = gcd(g, t.coeff.num());
      l = lcm(l, t.coeff.den());
    }
    if (g < 0) g = -g;
    return Rat(g, l);
  }

  /// Integer-primitive with positive leading coefficient; zero stays zero.
  MPoly normalized() const {
    if (terms_.empty()) return *this;
    Rat c = content();
    if (leading_coeff().sign() < 0) c = -c;
    return *this * c.inverse();
  }

  /// Scalar c with *this == c * normalized().
  Rat normalization_unit() const {
    if (terms_.empty()) return Rat(0);
    Rat c = content();
    return leading_coeff().sign() < 0 ? -c : c;
  }

  /// Coefficients with respect to v: result[i] is the coefficient of v^i.
  std::vector<MPoly> coefficients_in(Var v) const {
    int d = degree(v);
    std::vector<std::vector<Term>> buckets(static_cast<std::size_t>(std::max(d + 1, 0)));
    for (const auto& t : terms_) {
      int e = t.mono.exponent(v);
      buckets[e].push_back({Monomial::var(v, e).quotient_of(t.mono), t.coeff});
    }
    std::vector<MPoly> out;
    out.reserve(buckets.size());
    for (auto& b : buckets) {
      MPoly c(ring_);
      c.terms_ = std::move(b);  // quotient by v^e keeps order within a bucket
      out.push_back(std::move(c));
    }
    return out;
  }

  static MPoly from_coefficients(const std::vector<MPoly>& coeffs, Var v, Ring ring = {}) {
    MPoly r(ring | Ring{v});
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i].is_zero()) continue;
      r += coeffs[i].mul_monomial(Monomial::var(v, static_cast<int>(i)));
    }
    return r;
  }

  /// Terms of total degree exactly d.
  MPoly homogeneous_part(int d) const {
    MPoly r(ring_);
    for (const auto& t : terms_)
      if (t.mono.degree() == d) r.terms_.push_back(t);
    return r;
  }

  std::string str() const;

private:
  static MPoly merge(const MPoly& a, const MPoly& b, bool subtract) {
    MPoly r(a.ring_ | b.ring_);
    r.terms_.reserve(a.size() + b.size());
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    while (ia != a.terms_.end() || ib != b.terms_.end()) {
      if (ib == b.terms_.end() || (ia != a.terms_.end() && ia->mono > ib->mono)) {
        r.terms_.push_back(*ia++);
      } else if (ia == a.terms_.end() || ib->mono > ia->mono) {
        r.terms_.push_back({ib->mono, subtract ? -ib->coeff : ib->coeff});
        ++ib;
      } else {
        Rat c = subtract ? ia->coeff - ib->coeff : ia->coeff + ib->coeff;
        if (!c.is_zero()) r.terms_.push_back({ia->mono, std::move(c)});
        ++ia;
        ++ib;
      }
    }
    return r;
  }

  Ring ring_{};
  std::vector<Term> terms_;
};

/// Quotient a / b when b divides a exactly, std::nullopt otherwise.
inline std::optional<MPoly> exact_divide(const MPoly& a, const MPoly& b) {
  if (b.is_zero()) throw DivisionByZero();
  Ring ring = a.ring() | b.ring();
  if (a.is_zero()) return MPoly(ring);
  if (b.is_constant()) return a * b.leading_coeff().inverse();
  if (a.degree() < b.degree()) return std::nullopt;
  for (int i = 0; i < kMaxVars; ++i) {
    Var v = var_from_index(i);
    if (b.degree(v) > a.degree(v)) return std::nullopt;
  }
  const Monomial lm = b.leading_monomial();
  const Rat lc_inv = b.leading_coeff().inverse();
  // Remainder as an ordered map so the leading term is always at begin().
  std::map<Monomial, Rat, std::greater<>> rem;
  for (const auto& t : a.terms()) rem.emplace(t.mono, t.coeff);
  std::vector<Term> quotient;
  while (!rem.empty()) {
    auto lead = rem.begin();
    if (!lm.divides(lead->first)) return std::nullopt;
    Monomial qm = lm.quotient_of(lead->first);
    Rat qc = lead->second * lc_inv;
    for (const auto& t : b.terms()) {
      Monomial m = t.mono * qm;
      auto [it, inserted] = rem.try_emplace(m, Rat(0));
      it->second -= t.coeff * qc;
      if (it->second.is_zero()) rem.erase(it);
    }
    quotient.push_back({qm, std::move(qc)});
  }
  return MPoly::from_terms(std::move(quotient), ring);
}

inline std::string MPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    const bool neg = t.coeff.sign() < 0;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    Rat c = t.coeff.abs();
    std::string mono;
    for (int i = 0; i < kMaxVars; ++i) {
      int e = t.mono.exponent(var_from_index(i));
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += var_name(var_from_index(i));
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out += c.str();
    } else if (c.is_one()) {
      out += mono;
    } else {
      out += c.str() + "*" + mono;
    }
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const MPoly& p) { return os << p.str(); }
inline std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

}  // namespace lps
