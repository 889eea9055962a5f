#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace lps {

using Int = mpz_class;

/// Exact rational number in canonical form (denominator positive, reduced,
/// zero stored as 0/1).
class Rat {
public:
  Rat() = default;
  Rat(long v) : v_(v) {}                 // NOLINT(google-explicit-constructor)
  Rat(int v) : v_(v) {}                  // NOLINT(google-explicit-constructor)
  Rat(const Int& v) : v_(v) {}           // NOLINT(google-explicit-constructor)
  explicit Rat(const mpq_class& v) : v_(v) { v_.canonicalize(); }
  Rat(const Int& num, const Int& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }

  /// Parses "a" or "a/b".
  static Rat from_string(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (q.get_den() == 0) throw std::domain_error("rational with zero denominator");
    q.canonicalize();
    return Rat(q);
  }

  Int num() const { return v_.get_num(); }
  Int den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  Rat abs() const { return Rat(mpq_class(::abs(v_))); }
  Rat inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    return Rat(mpq_class(1) / v_);
  }

  std::string str() const { return v_.get_str(); }

private:
  mpq_class v_{0};
};

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

/// Exact quotient; caller guarantees divisibility.
inline Int exact_quotient(const Int& a, const Int& b) {
  Int q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

/// Residue of a in [0, m).
inline std::uint64_t mod_u64(const Int& a, std::uint64_t m) {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), a.get_mpz_t(), m);
  return r.get_ui();
}

}  // namespace lps

template <>
struct std::hash<lps::Rat> {
  std::size_t operator()(const lps::Rat& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
