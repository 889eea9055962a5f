#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lps {

/// The ambient variables, in term-order significance: x is compared first.
enum class Var : std::uint8_t { x = 0, y = 1, z = 2, w = 3 };

inline constexpr int kMaxVars = 4;

inline constexpr char var_name(Var v) { return "xyzw"[static_cast<int>(v)]; }
inline constexpr int var_index(Var v) { return static_cast<int>(v); }

inline Var var_from_index(int i) {
  if (i < 0 || i >= kMaxVars) throw std::out_of_range("variable index");
  return static_cast<Var>(i);
}

/// Ordered variable set, stored as a bitmask over {x, y, z, w}.
class Ring {
public:
  constexpr Ring() = default;
  constexpr explicit Ring(std::uint8_t mask) : mask_(mask & 0xF) {}
  constexpr Ring(std::initializer_list<Var> vars) {
    for (Var v : vars) mask_ |= static_cast<std::uint8_t>(1u << var_index(v));
  }

  static constexpr Ring xy() { return Ring{Var::x, Var::y}; }
  static constexpr Ring xyz() { return Ring{Var::x, Var::y, Var::z}; }

  constexpr bool contains(Var v) const { return (mask_ >> var_index(v)) & 1u; }
  constexpr int size() const { return __builtin_popcount(mask_); }
  constexpr std::uint8_t mask() const { return mask_; }
  constexpr Ring operator|(Ring o) const { return Ring(static_cast<std::uint8_t>(mask_ | o.mask_)); }
  constexpr bool operator==(const Ring&) const = default;

  /// Variables in significance order.
  template <typename F>
  void for_each(F&& f) const {
    for (int i = 0; i < kMaxVars; ++i)
      if ((mask_ >> i) & 1u) f(var_from_index(i));
  }

  std::string str() const {
    std::string s;
    for_each([&](Var v) { s += var_name(v); });
    return s;
  }

private:
  std::uint8_t mask_ = 0;
};

/// Exponent vector over {x, y, z, w}, packed so that integer comparison is
/// grlex comparison: [total degree | x | y | z | w], 12 bits each.
class Monomial {
public:
  static constexpr int kBits = 12;
  static constexpr std::uint64_t kFieldMask = (1ull << kBits) - 1;
  static constexpr int kMaxDegree = static_cast<int>(kFieldMask);

  constexpr Monomial() = default;

  static Monomial from_exponents(const std::array<int, kMaxVars>& e) {
    int deg = 0;
    for (int v : e) {
      if (v < 0) throw std::invalid_argument("negative exponent in monomial");
      deg += v;
    }
    if (deg > kMaxDegree) throw std::overflow_error("monomial degree too large");
    std::uint64_t bits = static_cast<std::uint64_t>(deg) << (4 * kBits);
    for (int i = 0; i < kMaxVars; ++i)
      bits |= static_cast<std::uint64_t>(e[i]) << ((3 - i) * kBits);
    return Monomial(bits);
  }

  static Monomial var(Var v, int power = 1) {
    std::array<int, kMaxVars> e{};
    e[var_index(v)] = power;
    return from_exponents(e);
  }

  constexpr int degree() const { return static_cast<int>(bits_ >> (4 * kBits)); }
  constexpr int exponent(Var v) const {
    return static_cast<int>((bits_ >> ((3 - var_index(v)) * kBits)) & kFieldMask);
  }
  std::array<int, kMaxVars> exponents() const {
    return {exponent(Var::x), exponent(Var::y), exponent(Var::z), exponent(Var::w)};
  }
  constexpr bool is_one() const { return bits_ == 0; }
  constexpr std::uint64_t bits() const { return bits_; }

  /// Variables with positive exponent.
  Ring support() const {
    std::uint8_t m = 0;
    for (int i = 0; i < kMaxVars; ++i)
      if (exponent(var_from_index(i)) > 0) m |= static_cast<std::uint8_t>(1u << i);
    return Ring(m);
  }

  friend Monomial operator*(Monomial a, Monomial b) {
    if (a.degree() + b.degree() > kMaxDegree) throw std::overflow_error("monomial degree too large");
    return Monomial(a.bits_ + b.bits_);
  }

  bool divides(Monomial o) const {
    for (int i = 0; i < kMaxVars; ++i) {
      Var v = var_from_index(i);
      if (exponent(v) > o.exponent(v)) return false;
    }
    return true;
  }

  /// o / *this; caller checks divides(o).
  Monomial quotient_of(Monomial o) const { return Monomial(o.bits_ - bits_); }

  constexpr auto operator<=>(const Monomial&) const = default;

private:
  constexpr explicit Monomial(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

}  // namespace lps

template <>
struct std::hash<lps::Monomial> {
  std::size_t operator()(const lps::Monomial& m) const noexcept {
    return std::hash<std::uint64_t>{}(m.bits());
  }
};
