#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lps/mpoly.hpp"

namespace lps {

/// Quotient that must exist; a failed division here is a bug.
inline MPoly divide_or_throw(const MPoly& a, const MPoly& b, const char* where) {
  auto q = exact_divide(a, b);
  if (!q) throw InternalError(std::string("inexact division in ") + where);
  return std::move(*q);
}

MPoly gcd(const MPoly& a, const MPoly& b);

namespace detail {

using Coeffs = std::vector<MPoly>;  // dense in the main variable, index = power

inline void trim(Coeffs& c) {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

inline int deg(const Coeffs& c) { return static_cast<int>(c.size()) - 1; }

/// lc(b)^(deg a - deg b + 1) * a mod b, over the coefficient ring.
inline Coeffs pseudo_remainder(Coeffs a, const Coeffs& b) {
  const int n = deg(b);
  const MPoly& lb = b.back();
  int steps = deg(a) - n + 1;
  while (deg(a) >= n && !a.empty()) {
    MPoly la = a.back();
    const int shift = deg(a) - n;
    for (auto& c : a) c = c * lb;
    for (int i = 0; i <= n; ++i) a[i + shift] -= la * b[i];
    trim(a);
    --steps;
  }
  if (steps > 0 && !a.empty()) {
    MPoly f = lb.pow(steps);
    for (auto& c : a) c = c * f;
  }
  return a;
}

inline Coeffs divide_coeffs(const Coeffs& a, const MPoly& d) {
  Coeffs out;
  out.reserve(a.size());
  for (const auto& c : a) out.push_back(divide_or_throw(c, d, "subresultant PRS"));
  return out;
}

/// gcd of all coefficients.
inline MPoly coeff_gcd(const Coeffs& c) {
  MPoly g;
  for (const auto& x : c) {
    if (x.is_zero()) continue;
    g = g.is_zero() ? x.normalized() : gcd(g, x);
    if (g.is_constant()) return MPoly(Rat(1));
  }
  return g;
}

/// Subresultant PRS gcd of two polynomials primitive in v.
inline MPoly subresultant_gcd(const MPoly& pa, const MPoly& pb, Var v) {
  Coeffs a = pa.coefficients_in(v), b = pb.coefficients_in(v);
  if (deg(a) < deg(b)) std::swap(a, b);
  MPoly g(Rat(1)), h(Rat(1));
  while (true) {
    const int delta = deg(a) - deg(b);
    Coeffs r = pseudo_remainder(a, b);
    if (r.empty()) break;
    if (deg(r) == 0) return MPoly(Rat(1));
    a = std::move(b);
    b = divide_coeffs(r, g * h.pow(delta));
    g = a.back();
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      h = divide_or_throw(g.pow(delta), h.pow(delta - 1), "subresultant PRS");
    }
  }
  MPoly last = MPoly::from_coefficients(b, v);
  MPoly cont = coeff_gcd(b);
  return divide_or_throw(last, cont, "subresultant PRS");
}

}  // namespace detail

/// gcd of the coefficients of p viewed as a polynomial in v, normalized.
inline MPoly content_in(const MPoly& p, Var v) { return detail::coeff_gcd(p.coefficients_in(v)); }

/// Normalized greatest common divisor (integer-primitive, positive leading
/// coefficient). gcd(f, 0) is normalized f; both zero is rejected.
inline MPoly gcd(const MPoly& a_in, const MPoly& b_in) {
  if (a_in.is_zero() && b_in.is_zero()) throw std::invalid_argument("gcd(0, 0) is undefined");
  const Ring ring = a_in.ring() | b_in.ring();
  if (a_in.is_zero()) return b_in.normalized().with_ring(ring);
  if (b_in.is_zero()) return a_in.normalized().with_ring(ring);
  if (a_in.is_constant() || b_in.is_constant()) return MPoly(Rat(1), ring);
  MPoly a = a_in.normalized(), b = b_in.normalized();
  if (a == b) return a.with_ring(ring);
  if (a.degree() >= b.degree()) {
    if (exact_divide(a, b)) return b.with_ring(ring);
  } else if (exact_divide(b, a)) {
    return a.with_ring(ring);
  }

  const Ring va = a.variables(), vb = b.variables();
  // A variable present in only one argument cannot occur in the gcd.
  for (int i = 0; i < kMaxVars; ++i) {
    Var v = var_from_index(i);
    if (va.contains(v) && !vb.contains(v)) return gcd(content_in(a, v), b).with_ring(ring);
    if (vb.contains(v) && !va.contains(v)) return gcd(a, content_in(b, v)).with_ring(ring);
  }

  Var main = Var::x;
  int best = -1;
  va.for_each([&](Var v) {
    int d = std::max(a.degree(v), b.degree(v));
    if (best < 0 || d < best) {
      best = d;
      main = v;
    }
  });

  MPoly ca = content_in(a, main), cb = content_in(b, main);
  MPoly pa = divide_or_throw(a, ca, "gcd content"), pb = divide_or_throw(b, cb, "gcd content");
  MPoly c = gcd(ca, cb);
  MPoly g = detail::subresultant_gcd(pa, pb, main);
  return (c * g).normalized().with_ring(ring);
}

struct SquareFreePart {
  MPoly factor;
  int multiplicity;
  bool operator==(const SquareFreePart&) const = default;
};

/// content * prod(factor^multiplicity) reproduces the input exactly.
struct SquareFreeDecomposition {
  Rat content;
  std::vector<SquareFreePart> parts;  // multiplicities strictly increasing

  MPoly expand() const {
    MPoly r(content);
    for (const auto& p : parts) r *= p.factor.pow(p.multiplicity);
    return r;
  }
};

namespace detail {

/// Yun's algorithm on a polynomial primitive in v; appends (factor, mult).
inline void yun(const MPoly& f, Var v, std::map<int, MPoly>& out) {
  MPoly df = f.derivative(v);
  MPoly a = gcd(f, df);
  MPoly b = divide_or_throw(f, a, "square-free decomposition");
  MPoly c = divide_or_throw(df, a, "square-free decomposition");
  MPoly d = c - b.derivative(v);
  int i = 1;
  while (!b.is_constant()) {
    MPoly ai = gcd(b, d);
    b = divide_or_throw(b, ai, "square-free decomposition");
    c = divide_or_throw(d, ai, "square-free decomposition");
    d = c - b.derivative(v);
    if (!ai.is_constant()) {
      auto [it, fresh] = out.try_emplace(i, ai.normalized());
      if (!fresh) it->second = (it->second * ai).normalized();
    }
    ++i;
  }
}

inline void squarefree_rec(const MPoly& p, std::map<int, MPoly>& out) {
  if (p.is_constant()) return;
  Var main = Var::x;
  int best = -1;
  p.variables().for_each([&](Var v) {
    if (p.degree(v) > best) {
      best = p.degree(v);
      main = v;
    }
  });
  MPoly cont = content_in(p, main);
  MPoly prim = divide_or_throw(p, cont, "square-free content");
  yun(prim, main, out);
  squarefree_rec(cont, out);
}

}  // namespace detail

inline SquareFreeDecomposition squarefree_decompose(const MPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("square-free decomposition of zero");
  std::map<int, MPoly> by_mult;
  detail::squarefree_rec(p.normalized(), by_mult);
  SquareFreeDecomposition d;
  for (auto& [m, f] : by_mult) d.parts.push_back({f.normalized().with_ring(p.ring()), m});
  MPoly prod(Rat(1));
  for (const auto& part : d.parts) prod *= part.factor.pow(part.multiplicity);
  d.content = p.leading_coeff() / prod.leading_coeff();
  return d;
}

}  // namespace lps
