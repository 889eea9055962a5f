#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>

#include "lps/errors.hpp"
#include "lps/mpoly.hpp"
#include "lps/ratfunc.hpp"

namespace lps {

/// y' = M/N (order 1, ring {x,y}) or y'' = z' = M/N (order 2, ring {x,y,z},
/// z standing for y'). gcd(M, N) is constant and N is integer-primitive with
/// positive leading coefficient; M carries the same scale.
struct RationalODE {
  int order = 1;
  MPoly M;
  MPoly N{Rat(1)};

  Ring ring() const { return order == 1 ? Ring::xy() : Ring::xyz(); }
  RatFunc rhs() const { return RatFunc(M, N); }

  static RationalODE from_rhs(int order, const RatFunc& f) {
    RationalODE ode;
    ode.order = order;
    Ring r = order == 1 ? Ring::xy() : Ring::xyz();
    ode.M = f.num().with_ring(r);
    ode.N = f.den().with_ring(r);
    return ode;
  }
};

namespace detail {

inline constexpr int kMaxAbsExponent = 64;

class ExprParser {
public:
  ExprParser(std::string_view text, Ring allowed) : text_(text), allowed_(allowed) {}

  /// Parses the right-hand side of an ODE, with or without the head marker.
  RatFunc ode_rhs(int order) {
    skip_ws();
    if (has_equals()) {
      head(order);
      skip_ws();
      expect('=');
    }
    return full_expr();
  }

  RatFunc full_expr() {
    skip_ws();
    if (at_end()) error("empty expression");
    RatFunc r = expr();
    skip_ws();
    if (!at_end()) error(std::string("unexpected '") + peek() + "'");
    return r;
  }

  [[noreturn]] void error(const std::string& what) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  std::size_t position() const { return pos_; }

private:
  bool has_equals() const { return text_.find('=') != std::string_view::npos; }

  void head(int order) {
    auto start = pos_;
    std::string h;
    while (!at_end() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '=') h += text_[pos_++];
    const bool ok = order == 1 ? h == "y'" : (h == "y''" || h == "z'");
    if (!ok) {
      pos_ = start;
      error(order == 1 ? "expected \"y'\" before '='" : "expected \"y''\" or \"z'\" before '='");
    }
  }

  RatFunc expr() {
    RatFunc acc = term();
    while (true) {
      skip_ws();
      if (match('+')) {
        acc = acc + term();
      } else if (match('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  RatFunc term() {
    RatFunc acc = factor();
    while (true) {
      skip_ws();
      if (peek() == '*' && peek(1) != '*') {
        ++pos_;
        acc = acc * factor();
      } else if (peek() == '/') {
        ++pos_;
        auto at = pos_;
        RatFunc d = factor();
        if (d.is_zero()) {
          pos_ = at;
          error("division by zero");
        }
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  RatFunc factor() {
    skip_ws();
    if (match('-')) return -factor();
    if (match('+')) return factor();
    RatFunc b = base();
    skip_ws();
    if (peek() == '^' || (peek() == '*' && peek(1) == '*')) {
      pos_ += peek() == '^' ? 1 : 2;
      int e = exponent();
      if (e < 0 && b.is_zero()) error("zero raised to a negative power");
      return b.pow(e);
    }
    return b;
  }

  int exponent() {
    skip_ws();
    bool paren = match('(');
    skip_ws();
    bool neg = false;
    if (match('-')) {
      neg = true;
    } else {
      match('+');
    }
    skip_ws();
    if (!std::isdigit(static_cast<unsigned char>(peek()))) error("expected an integer exponent");
    long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (text_[pos_++] - '0');
      if (v > kMaxAbsExponent) error("exponent exceeds the bound of 64");
    }
    if (paren) {
      skip_ws();
      if (!match(')')) error("expected ')'");
    }
    return static_cast<int>(neg ? -v : v);
  }

  RatFunc base() {
    skip_ws();
    if (at_end()) error("unexpected end of input");
    char c = peek();
    if (c == '(') {
      ++pos_;
      RatFunc r = expr();
      skip_ws();
      if (!match(')')) error("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return RatFunc(MPoly(number()));
    if (std::isalpha(static_cast<unsigned char>(c))) {
      auto at = pos_;
      std::string id;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') id += text_[pos_++];
      if (id.size() == 1) {
        for (int i = 0; i < kMaxVars; ++i) {
          Var v = var_from_index(i);
          if (id[0] == var_name(v)) {
            if (!allowed_.contains(v)) {
              pos_ = at;
              error("variable '" + id + "' is not allowed here (allowed: " + allowed_.str() + ")");
            }
            return RatFunc(MPoly::var(v));
          }
        }
      }
      pos_ = at;
      error("unknown identifier '" + id + "'");
    }
    error(std::string("unexpected '") + c + "'");
  }

  Rat number() {
    std::string digits;
    while (std::isdigit(static_cast<unsigned char>(peek()))) digits += text_[pos_++];
    std::string frac;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) frac += text_[pos_++];
      if (digits.empty() && frac.empty()) error("malformed number");
    }
    Int num(digits.empty() ? std::string("0") : digits);
    if (frac.empty()) return Rat(num);
    Int scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    return Rat(num * scale + Int(frac), scale);
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool match(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!match(c)) error(std::string("expected '") + c + "'");
  }

  std::string_view text_;
  Ring allowed_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses "y' = <expr>" (order 1) or "y'' = <expr>" / "z' = <expr>" (order 2).
/// The head may be omitted. Common factors of numerator and denominator are
/// cancelled; negative exponents move factors to the denominator.
inline RationalODE parse_ode(std::string_view text, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("ODE order must be 1 or 2");
  const Ring ring = order == 1 ? Ring::xy() : Ring::xyz();
  detail::ExprParser p(text, ring);
  RatFunc rhs = p.ode_rhs(order);
  return RationalODE::from_rhs(order, rhs);
}

/// Parses a rational function in lowest terms.
inline RatFunc parse_ratfunc(std::string_view text, Ring allowed = Ring(0xF)) {
  detail::ExprParser p(text, allowed);
  return p.full_expr();
}

/// Parses a polynomial; division is allowed only by nonzero constants.
inline MPoly parse_poly(std::string_view text, Ring allowed = Ring(0xF)) {
  detail::ExprParser p(text, allowed);
  RatFunc r = p.full_expr();
  if (!r.is_polynomial()) throw ParseError("division by a non-constant polynomial", 1, 1);
  return (r.num() * r.den().leading_coeff().inverse()).with_ring(allowed);
}

}  // namespace lps
