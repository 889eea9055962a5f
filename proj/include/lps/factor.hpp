#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lps/field.hpp"
#include "lps/gcd.hpp"
#include "lps/linalg.hpp"
#include "lps/mpoly.hpp"

namespace lps {

/// unit * prod(factor^multiplicity); factors normalized and pairwise distinct.
struct Factorization {
  Rat unit{1};
  std::vector<std::pair<MPoly, int>> factors;

  MPoly expand() const {
    MPoly r(unit);
    for (const auto& [f, m] : factors) r *= f.pow(m);
    return r;
  }
};

namespace detail {

// Dense univariate polynomials, lowest degree first.
using IPoly = std::vector<Int>;

namespace zp {

using u64 = std::uint64_t;
using Poly = std::vector<u64>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b, u64 p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ((i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0)) % p;
  trim(r);
  return r;
}

inline Poly sub(const Poly& a, const Poly& b, u64 p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ((i < a.size() ? a[i] : 0) + p - (i < b.size() ? b[i] : 0)) % p;
  trim(r);
  return r;
}

inline Poly scale(const Poly& a, u64 c, u64 p) {
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c % p;
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  trim(r);
  return r;
}

inline std::pair<Poly, Poly> divrem(Poly a, const Poly& b, u64 p) {
  if (b.empty()) throw DivisionByZero();
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  const u64 inv = invmod(b.back(), p);
  const std::size_t db = b.size() - 1;
  Poly q(a.size() - db, 0);
  for (std::size_t i = a.size(); i-- > db;) {
    const u64 c = a[i] * inv % p;
    q[i - db] = c;
    if (!c) continue;
    for (std::size_t j = 0; j <= db; ++j) a[i - db + j] = (a[i - db + j] + p - c * b[j] % p) % p;
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline Poly rem(const Poly& a, const Poly& b, u64 p) { return divrem(a, b, p).second; }

inline Poly monic(const Poly& a, u64 p) { return a.empty() ? a : scale(a, invmod(a.back(), p), p); }

inline Poly gcd(Poly a, Poly b, u64 p) {
  while (!b.empty()) {
    Poly r = rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

inline Poly derivative(const Poly& a, u64 p) {
  Poly r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * (i % p) % p);
  trim(r);
  return r;
}

inline Poly powmod(const Poly& base, const Int& e, const Poly& f, u64 p) {
  Poly result{1};
  Poly b = rem(base, f, p);
  const auto bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (std::size_t i = bits; i-- > 0;) {
    result = rem(mul(result, result, p), f, p);
    if (mpz_tstbit(e.get_mpz_t(), i)) result = rem(mul(result, b, p), f, p);
  }
  return rem(result, f, p);
}

/// s, t with s*a + t*b = 1 for coprime a, b.
inline std::pair<Poly, Poly> xgcd(const Poly& a, const Poly& b, u64 p) {
  Poly r0 = a, r1 = b, s0{1}, s1, t0, t1{1};
  while (!r1.empty()) {
    auto [q, r] = divrem(r0, r1, p);
    Poly s2 = sub(s0, mul(q, s1, p), p);
    Poly t2 = sub(t0, mul(q, t1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1) throw InternalError("xgcd of non-coprime polynomials");
  const u64 inv = invmod(r0[0], p);
  return {scale(s0, inv, p), scale(t0, inv, p)};
}

/// Distinct-degree factorization of a monic square-free polynomial.
inline std::vector<std::pair<Poly, int>> distinct_degree(Poly f, u64 p) {
  std::vector<std::pair<Poly, int>> out;
  const Poly x{0, 1};
  Poly h = rem(x, f, p);
  int d = 0;
  while (deg(f) >= 2 * (d + 1)) {
    ++d;
    h = powmod(h, Int(static_cast<unsigned long>(p)), f, p);
    Poly w = gcd(sub(h, x, p), f, p);
    if (deg(w) > 0) {
      out.emplace_back(w, d);
      f = divrem(f, w, p).first;
      h = rem(h, f, p);
    }
  }
  if (deg(f) > 0) out.emplace_back(f, deg(f));
  return out;
}

/// Cantor-Zassenhaus splitting of a product of degree-d monic irreducibles.
inline void equal_degree(const Poly& f, int d, u64 p, std::mt19937_64& rng, std::vector<Poly>& out) {
  if (deg(f) == d) {
    out.push_back(f);
    return;
  }
  Int e;
  mpz_ui_pow_ui(e.get_mpz_t(), p, static_cast<unsigned long>(d));
  e = (e - 1) / 2;
  std::uniform_int_distribution<u64> coef(0, p - 1);
  while (true) {
    Poly a(static_cast<std::size_t>(deg(f)));
    for (auto& c : a) c = coef(rng);
    trim(a);
    if (deg(a) < 1) continue;
    Poly b = sub(powmod(a, e, f, p), Poly{1}, p);
    Poly w = gcd(b, f, p);
    if (deg(w) > 0 && deg(w) < deg(f)) {
      equal_degree(w, d, p, rng, out);
      equal_degree(divrem(f, w, p).first, d, p, rng, out);
      return;
    }
  }
}

inline std::vector<Poly> factor_squarefree_monic(const Poly& f, u64 p, std::mt19937_64& rng) {
  std::vector<Poly> out;
  for (const auto& [g, d] : distinct_degree(f, p)) equal_degree(g, d, p, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace zp

namespace zm {

inline void trim(IPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline IPoly reduce(IPoly a, const Int& m) {
  for (auto& c : a) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
  trim(a);
  return a;
}

inline IPoly add(const IPoly& a, const IPoly& b, const Int& m) {
  IPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] += b[i];
  }
  return reduce(std::move(r), m);
}

inline IPoly sub(const IPoly& a, const IPoly& b, const Int& m) {
  IPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] -= b[i];
  }
  return reduce(std::move(r), m);
}

inline IPoly mul(const IPoly& a, const IPoly& b, const Int& m) {
  if (a.empty() || b.empty()) return {};
  IPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  return reduce(std::move(r), m);
}

/// Division by a monic polynomial modulo m.
inline std::pair<IPoly, IPoly> divrem_monic(IPoly a, const IPoly& b, const Int& m) {
  a = reduce(std::move(a), m);
  if (a.size() < b.size()) return {{}, a};
  const std::size_t db = b.size() - 1;
  IPoly q(a.size() - db);
  for (std::size_t i = a.size(); i-- > db;) {
    Int c = a[i];
    mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
    q[i - db] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
  }
  return {reduce(std::move(q), m), reduce(std::move(a), m)};
}

inline IPoly symmetric(IPoly a, const Int& m) {
  const Int half = m / 2;
  for (auto& c : a) {
    mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
    if (c > half) c -= m;
  }
  trim(a);
  return a;
}

inline IPoly from_zp(const zp::Poly& a) {
  IPoly r;
  for (auto c : a) r.emplace_back(static_cast<unsigned long>(c));
  return r;
}

}  // namespace zm

inline int ideg(const IPoly& a) { return static_cast<int>(a.size()) - 1; }

inline Int icontent(const IPoly& a) {
  Int g = 0;
  for (const auto& c : a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

/// Divides out the content and makes the leading coefficient positive.
inline IPoly iprimitive(IPoly a) {
  zm::trim(a);
  if (a.empty()) return a;
  Int g = icontent(a);
  if (a.back() < 0) g = -g;
  for (auto& c : a) c = exact_quotient(c, g);
  return a;
}

inline std::optional<IPoly> idivide_exact(IPoly a, const IPoly& b) {
  zm::trim(a);
  if (b.empty()) throw DivisionByZero();
  if (a.empty()) return IPoly{};
  if (a.size() < b.size()) return std::nullopt;
  const std::size_t db = b.size() - 1;
  IPoly q(a.size() - db);
  for (std::size_t i = a.size(); i-- > db;) {
    if (a[i] == 0) continue;
    if (!mpz_divisible_p(a[i].get_mpz_t(), b.back().get_mpz_t())) return std::nullopt;
    Int c = exact_quotient(a[i], b.back());
    q[i - db] = c;
    for (std::size_t j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
  }
  for (const auto& c : a)
    if (c != 0) return std::nullopt;
  zm::trim(q);
  return q;
}

/// One quadratic Hensel step: f = g*h, s*g + t*h = 1 modulo m, h monic;
/// returns the same relations modulo m^2.
inline void hensel_step(const IPoly& f, IPoly& g, IPoly& h, IPoly& s, IPoly& t, const Int& m) {
  const Int m2 = m * m;
  IPoly e = zm::sub(f, zm::mul(g, h, m2), m2);
  auto [q, r] = zm::divrem_monic(zm::mul(s, e, m2), h, m2);
  IPoly g2 = zm::add(g, zm::add(zm::mul(t, e, m2), zm::mul(q, g, m2), m2), m2);
  IPoly h2 = zm::add(h, r, m2);
  IPoly b = zm::sub(zm::add(zm::mul(s, g2, m2), zm::mul(t, h2, m2), m2), IPoly{Int(1)}, m2);
  auto [c, d] = zm::divrem_monic(zm::mul(s, b, m2), h2, m2);
  IPoly s2 = zm::sub(s, d, m2);
  IPoly t2 = zm::sub(zm::sub(t, zm::mul(t, b, m2), m2), zm::mul(c, g2, m2), m2);
  g = std::move(g2);
  h = std::move(h2);
  s = std::move(s2);
  t = std::move(t2);
}

inline Int inverse_mod(const Int& a, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t())) throw InternalError("non-invertible leading coefficient");
  return r;
}

/// Lifts f = lc(f) * prod(us) mod p to monic factors modulo M = p^(2^j).
inline std::vector<IPoly> multifactor_lift(const IPoly& f, const std::vector<zp::Poly>& us, std::uint64_t p,
                                          const Int& M) {
  const Int P(static_cast<unsigned long>(p));
  std::vector<IPoly> out;
  IPoly cur = zm::reduce(f, M);
  for (std::size_t i = 0; i + 1 < us.size(); ++i) {
    Int lc = cur.back();
    const std::uint64_t lcp = mod_u64(lc, p);
    zp::Poly g0 = zp::scale(us[i], lcp, p);
    zp::Poly h0{1};
    for (std::size_t j = i + 1; j < us.size(); ++j) h0 = zp::mul(h0, us[j], p);
    auto [s0, t0] = zp::xgcd(g0, h0, p);
    IPoly g = zm::from_zp(g0), h = zm::from_zp(h0), s = zm::from_zp(s0), t = zm::from_zp(t0);
    for (Int m = P; m < M; m *= m) hensel_step(cur, g, h, s, t, m);
    const Int inv = inverse_mod(lc, M);
    for (auto& c : g) c *= inv;
    out.push_back(zm::reduce(std::move(g), M));
    cur = std::move(h);
  }
  const Int inv = inverse_mod(cur.back(), M);
  for (auto& c : cur) c *= inv;
  out.push_back(zm::reduce(std::move(cur), M));
  return out;
}

inline std::vector<std::uint64_t> small_primes(std::size_t count) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t n = 3; ps.size() < count; n += 2) {
    bool prime = true;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
      if (n % d == 0) {
        prime = false;
        break;
      }
    if (prime) ps.push_back(n);
  }
  return ps;
}

inline zp::Poly to_zp(const IPoly& f, std::uint64_t p) {
  zp::Poly r;
  for (const auto& c : f) r.push_back(mod_u64(c, p));
  zp::trim(r);
  return r;
}

/// Irreducible factors over Z of a primitive square-free polynomial.
inline std::vector<IPoly> zassenhaus(IPoly f) {
  f = iprimitive(std::move(f));
  std::vector<IPoly> result;
  if (ideg(f) <= 0) return result;
  if (f[0] == 0) {
    result.push_back(IPoly{Int(0), Int(1)});
    f.erase(f.begin());
    auto rest = zassenhaus(std::move(f));
    result.insert(result.end(), rest.begin(), rest.end());
    return result;
  }
  if (ideg(f) == 1) return {f};

  // prime with the fewest modular factors among the first few good ones
  std::mt19937_64 rng(0x5eed);
  std::uint64_t best_p = 0;
  std::vector<zp::Poly> best;
  int good = 0;
  for (std::uint64_t p : small_primes(400)) {
    if (mod_u64(f.back(), p) == 0) continue;
    zp::Poly fp = to_zp(f, p);
    if (zp::deg(zp::gcd(fp, zp::derivative(fp, p), p)) > 0) continue;
    auto us = zp::factor_squarefree_monic(zp::monic(fp, p), p, rng);
    if (best_p == 0 || us.size() < best.size()) {
      best_p = p;
      best = std::move(us);
    }
    if (++good == 5 || best.size() == 1) break;
  }
  if (best_p == 0) throw InternalError("no suitable prime for factorization");
  if (best.size() == 1) return {f};

  const int n = ideg(f);
  Int norm2 = 0;
  for (const auto& c : f) norm2 += c * c;
  Int root;
  mpz_sqrt(root.get_mpz_t(), norm2.get_mpz_t());
  Int bound = (root + 1) * abs(f.back());
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), static_cast<unsigned long>(n));
  const Int target = 2 * bound + 1;
  Int M(static_cast<unsigned long>(best_p));
  while (M < target) M *= M;

  std::vector<IPoly> lifted = multifactor_lift(f, best, best_p, M);
  std::vector<std::size_t> live(lifted.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
  IPoly rest = f;
  std::size_t s = 1;
  while (2 * s <= live.size()) {
    bool found = false;
    std::vector<std::size_t> pick(s);
    for (std::size_t i = 0; i < s; ++i) pick[i] = i;
    while (true) {
      IPoly g{rest.back()};
      for (std::size_t i : pick) g = zm::mul(g, lifted[live[i]], M);
      g = zm::symmetric(std::move(g), M);
      bool plausible = rest[0] == 0 || (g[0] != 0 && mpz_divisible_p(Int(rest[0] * rest.back()).get_mpz_t(),
                                                                       g[0].get_mpz_t()));
      if (plausible) {
        IPoly pg = iprimitive(g);
        if (auto q = idivide_exact(rest, pg)) {
          result.push_back(pg);
          rest = iprimitive(std::move(*q));
          std::vector<std::size_t> keep;
          for (std::size_t i = 0; i < live.size(); ++i)
            if (std::find(pick.begin(), pick.end(), i) == pick.end()) keep.push_back(live[i]);
          live = std::move(keep);
          found = true;
          break;
        }
      }
      // next combination in lexicographic order
      std::size_t k = s;
      while (k > 0 && pick[k - 1] == live.size() - s + k - 1) --k;
      if (k == 0) break;
      ++pick[k - 1];
      for (std::size_t j = k; j < s; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!found) ++s;
  }
  if (ideg(rest) > 0) result.push_back(rest);
  return result;
}

inline IPoly to_ipoly(const MPoly& p, Var v) {
  MPoly n = p.normalized();
  IPoly r(static_cast<std::size_t>(std::max(n.degree(v) + 1, 0)));
  for (const auto& t : n.terms()) r[t.mono.exponent(v)] = t.coeff.num();
  return r;
}

inline MPoly from_ipoly(const IPoly& a, Var v, Ring ring = {}) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) terms.push_back({Monomial::var(v, static_cast<int>(i)), Rat(a[i])});
  return MPoly::from_terms(std::move(terms), ring);
}

inline Var single_variable(const MPoly& p) {
  Var found = Var::x;
  int count = 0;
  p.variables().for_each([&](Var v) {
    found = v;
    ++count;
  });
  if (count > 1) throw std::invalid_argument("expected a univariate polynomial");
  return found;
}

inline void sort_factors(std::vector<std::pair<MPoly, int>>& fs) {
  std::sort(fs.begin(), fs.end(), [](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    return a.first.str() < b.first.str();
  });
}

inline Factorization assemble_factorization(const MPoly& p, std::vector<std::pair<MPoly, int>> fs) {
  sort_factors(fs);
  Factorization out;
  out.factors = std::move(fs);
  MPoly prod(Rat(1));
  for (const auto& [f, m] : out.factors) prod *= f.pow(m);
  out.unit = p.leading_coeff() / prod.leading_coeff();
  return out;
}

}  // namespace detail

inline Factorization factor_univariate(const MPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("factorization of zero");
  if (p.is_constant()) return {p.constant_value(), {}};
  const Var v = detail::single_variable(p);
  std::vector<std::pair<MPoly, int>> fs;
  for (const auto& part : squarefree_decompose(p).parts)
    for (const auto& g : detail::zassenhaus(detail::to_ipoly(part.factor, v)))
      fs.emplace_back(detail::from_ipoly(g, v, p.ring()), part.multiplicity);
  return detail::assemble_factorization(p, std::move(fs));
}

namespace detail {

/// Monomial-free, content-free square-free f: Kronecker image, factor,
/// recombine sub-multisets by exact trial division.
inline void kronecker_factors(const MPoly& f_in, std::vector<MPoly>& out) {
  std::vector<Var> vars;
  f_in.variables().for_each([&](Var v) { vars.push_back(v); });
  std::vector<int> bound, weight;
  long w = 1;
  for (Var v : vars) {
    weight.push_back(static_cast<int>(w));
    bound.push_back(f_in.degree(v));
    w *= f_in.degree(v) + 1;
  }
  if (w > Monomial::kMaxDegree + 1) throw std::length_error("Kronecker image degree too large");
  const Var t = Var::x;
  auto image = [&](const MPoly& g) {
    std::vector<Term> terms;
    for (const auto& term : g.terms()) {
      int e = 0;
      for (std::size_t i = 0; i < vars.size(); ++i) e += term.mono.exponent(vars[i]) * weight[i];
      terms.push_back({Monomial::var(t, e), term.coeff});
    }
    return MPoly::from_terms(std::move(terms));
  };
  auto decode = [&](const MPoly& g) -> std::optional<MPoly> {
    std::vector<Term> terms;
    for (const auto& term : g.terms()) {
      int e = term.mono.exponent(t);
      std::array<int, kMaxVars> ex{};
      for (std::size_t i = 0; i < vars.size(); ++i) {
        const int digit = i + 1 < vars.size() ? e % (bound[i] + 1) : e;
        if (digit > bound[i]) return std::nullopt;
        ex[var_index(vars[i])] = digit;
        e /= bound[i] + 1;
      }
      terms.push_back({Monomial::from_exponents(ex), term.coeff});
    }
    return MPoly::from_terms(std::move(terms), f_in.ring());
  };

  std::vector<MPoly> pool;
  for (const auto& [u, m] : factor_univariate(image(f_in)).factors)
    for (int i = 0; i < m; ++i) pool.push_back(u);

  MPoly rest = f_in;
  std::size_t s = 1;
  while (2 * s <= pool.size()) {
    bool found = false;
    std::vector<std::size_t> pick;
    // sub-multisets of size s, index sets in lexicographic order, repeats skipped
    auto search = [&](auto&& self, std::size_t from) -> bool {
      if (pick.size() == s) {
        MPoly g(Rat(1));
        for (std::size_t i : pick) g *= pool[i];
        auto cand = decode(g);
        if (!cand || cand->is_constant()) return false;
        auto q = exact_divide(rest, *cand);
        if (!q) return false;
        out.push_back(cand->normalized());
        rest = *q;
        std::vector<MPoly> keep;
        for (std::size_t i = 0; i < pool.size(); ++i)
          if (std::find(pick.begin(), pick.end(), i) == pick.end()) keep.push_back(pool[i]);
        pool = std::move(keep);
        return true;
      }
      for (std::size_t i = from; i < pool.size(); ++i) {
        if (i > from && pool[i] == pool[i - 1]) continue;
        pick.push_back(i);
        if (self(self, i + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    found = search(search, 0);
    if (!found) ++s;
  }
  if (!rest.is_constant()) out.push_back(rest.normalized());
}

inline void squarefree_irreducibles(const MPoly& f, std::vector<MPoly>& out) {
  if (f.is_constant()) return;
  if (f.variables().size() == 1) {
    const Var v = single_variable(f);
    for (const auto& g : zassenhaus(to_ipoly(f, v))) out.push_back(from_ipoly(g, v, f.ring()));
    return;
  }
  // monomial factors
  MPoly g = f;
  bool stripped = false;
  g.variables().for_each([&](Var v) {
    int lo = g.degree(v);
    for (const auto& t : g.terms()) lo = std::min(lo, t.mono.exponent(v));
    if (lo > 0) {
      out.push_back(MPoly::var(v, f.ring()));
      g = *exact_divide(g, MPoly::var(v));
      stripped = true;
    }
  });
  if (stripped) {
    squarefree_irreducibles(g, out);
    return;
  }
  // content with respect to each variable
  bool split = false;
  g.variables().for_each([&](Var v) {
    if (split) return;
    MPoly c = content_in(g, v);
    if (!c.is_constant()) {
      squarefree_irreducibles(c, out);
      squarefree_irreducibles(*exact_divide(g, c), out);
      split = true;
    }
  });
  if (!split) kronecker_factors(g.normalized(), out);
}

}  // namespace detail

inline Factorization factor_multivariate(const MPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("factorization of zero");
  if (p.is_constant()) return {p.constant_value(), {}};
  std::vector<std::pair<MPoly, int>> fs;
  for (const auto& part : squarefree_decompose(p).parts) {
    std::vector<MPoly> irr;
    detail::squarefree_irreducibles(part.factor, irr);
    for (auto& g : irr) fs.emplace_back(g.normalized().with_ring(p.ring()), part.multiplicity);
  }
  return detail::assemble_factorization(p, std::move(fs));
}

/// Rational roots of a univariate polynomial, increasing.
inline std::vector<Rat> rational_roots(const MPoly& p) {
  std::vector<Rat> roots;
  if (p.is_zero() || p.is_constant()) return roots;
  const Var v = detail::single_variable(p);
  for (const auto& [f, m] : factor_univariate(p).factors)
    if (f.degree() == 1) roots.push_back(-f.coeff(Monomial()) / f.coeff(Monomial::var(v)));
  std::sort(roots.begin(), roots.end());
  return roots;
}

struct DarbouxFactor {
  MPoly p;
  MPoly q;  // cofactor
  int multiplicity = 1;
};

/// X(p) = q p for the polynomial (cleared) field; nullopt when p is not a
/// Darboux polynomial.
inline std::optional<DarbouxFactor> darboux_check(const VectorField& field, const MPoly& p) {
  if (p.is_constant()) throw std::invalid_argument("Darboux check needs a non-constant polynomial");
  auto q = exact_divide(field.apply_cleared(p), p);
  if (!q) return std::nullopt;
  return DarbouxFactor{p, q->with_ring(field.ring()), 1};
}

namespace detail {

using RatPoly = std::vector<Rat>;  // lowest degree first

inline void rtrim(RatPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

/// Resultant over Q by the Euclidean remainder sequence.
inline Rat resultant(RatPoly a, RatPoly b) {
  rtrim(a);
  rtrim(b);
  if (a.empty() || b.empty()) return Rat(0);
  Rat acc(1);
  while (true) {
    const int m = static_cast<int>(a.size()) - 1, n = static_cast<int>(b.size()) - 1;
    if (n == 0) {
      Rat r = acc;
      for (int i = 0; i < m; ++i) r *= b[0];
      return r;
    }
    if (m == 0) {
      Rat r = acc;
      for (int i = 0; i < n; ++i) r *= a[0];
      return r;
    }
    // r = a mod b
    RatPoly r = a;
    const Rat inv = b.back().inverse();
    for (int i = m; i >= n; --i) {
      const Rat c = r[i] * inv;
      if (c.is_zero()) continue;
      for (int j = 0; j <= n; ++j) r[i - n + j] -= c * b[j];
    }
    rtrim(r);
    if (r.empty()) return Rat(0);
    const int dr = static_cast<int>(r.size()) - 1;
    if ((m * n) % 2) acc = -acc;
    for (int i = 0; i < m - dr; ++i) acc *= b.back();
    a = std::move(b);
    b = std::move(r);
  }
}

inline RatPoly univariate_coeffs(const MPoly& p, Var v) {
  RatPoly r(static_cast<std::size_t>(std::max(p.degree(v) + 1, 0)), Rat(0));
  for (const auto& t : p.terms()) r[t.mono.exponent(v)] += t.coeff;
  rtrim(r);
  return r;
}

/// Res_v(a, b) for a, b in Q[u][v], by evaluation at integer u and Newton
/// interpolation.
inline MPoly resultant_in(const MPoly& a, const MPoly& b, Var v, Var u) {
  const int D = a.degree(u) * b.degree(v) + b.degree(u) * a.degree(v);
  auto ca = a.coefficients_in(v), cb = b.coefficients_in(v);
  std::vector<Rat> xs, ys;
  for (long s = 0; static_cast<int>(xs.size()) <= D; ++s) {
    const Rat pt(s);
    std::array<Rat, kMaxVars> at{};
    at[var_index(u)] = pt;
    if (ca.back().evaluate(at).is_zero() || cb.back().evaluate(at).is_zero()) continue;
    const MPoly sa = a.substitute({{u, MPoly(pt)}}), sb = b.substitute({{u, MPoly(pt)}});
    xs.push_back(pt);
    ys.push_back(resultant(univariate_coeffs(sa, v), univariate_coeffs(sb, v)));
  }
  // divided differences
  std::vector<Rat> c = ys;
  for (std::size_t j = 1; j < xs.size(); ++j)
    for (std::size_t i = xs.size() - 1; i >= j; --i) c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j]);
  MPoly result, basis(Rat(1));
  const MPoly U = MPoly::var(u);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    result += basis * c[i];
    basis *= U - MPoly(xs[i]);
  }
  return result;
}

inline MPoly gcd_all(const std::vector<MPoly>& ps) {
  MPoly g;
  for (const auto& p : ps)
    if (!p.is_zero()) g = g.is_zero() ? p.normalized() : gcd(g, p);
  return g;
}

}  // namespace detail

/// Degree-one Darboux polynomials. `lines` holds every isolated one;
/// `families` holds g(s, t) (s as z, t as w) whenever all y - s x - t with
/// g(s, t) = 0 are Darboux polynomials, and `lines` then also contains the
/// representatives with s in {0, 1, -1}.
struct Degree1Result {
  std::vector<MPoly> lines;
  std::vector<MPoly> families;
  bool family() const { return !families.empty(); }
};

inline Degree1Result degree1_dp_search(const VectorField& field) {
  if (field.order() != 1) throw std::invalid_argument("degree-one search needs a first-order field");
  const Var S = Var::z, T = Var::w;
  const MPoly s = MPoly::var(S), t = MPoly::var(T), x = MPoly::var(Var::x), y = MPoly::var(Var::y);
  Degree1Result res;
  std::vector<MPoly> cands;
  auto line = [&](const Rat& s0, const Rat& t0) { return y - x * s0 - MPoly(t0); };

  // chart y = s x + t
  MPoly R = (field.M() - s * field.N()).substitute({{Var::y, s * x + t}});
  std::vector<MPoly> cs;
  for (auto& c : R.coefficients_in(Var::x))
    if (!c.is_zero()) cs.push_back(c);
  MPoly g = detail::gcd_all(cs);
  if (!g.is_constant()) {
    res.families.push_back(g);
    for (int s0 : {0, 1, -1}) {
      MPoly gs = g.substitute({{S, MPoly(Rat(s0))}});
      if (gs.is_zero()) {
        cands.push_back(line(Rat(s0), Rat(0)));
      } else {
        for (const Rat& t0 : rational_roots(gs)) cands.push_back(line(Rat(s0), t0));
      }
    }
    for (auto& c : cs) c = *exact_divide(c, g);
  }
  bool solvable = !cs.empty();
  for (const auto& c : cs)
    if (c.is_constant()) solvable = false;
  if (solvable) {
    std::vector<MPoly> with_t, without_t;
    for (const auto& c : cs) (c.degree(T) > 0 ? with_t : without_t).push_back(c);
    MPoly hs = detail::gcd_all(without_t);
    if (with_t.size() >= 2) {
      for (int attempt = 0; attempt < 16; ++attempt) {
        MPoly l1, l2;
        for (std::size_t i = 0; i < with_t.size(); ++i) {
          l1 += with_t[i] * Rat(static_cast<long>(1 + (i * (attempt + 1)) % 7));
          l2 += with_t[i] * Rat(static_cast<long>(1 + (i * i + 2 * attempt + 3) % 11));
        }
        if (l1.degree(T) <= 0 || l2.degree(T) <= 0) continue;
        MPoly r = detail::resultant_in(l1, l2, T, S);
        if (r.is_zero()) continue;
        hs = hs.is_zero() ? r.normalized() : gcd(hs, r);
        break;
      }
    }
    if (!hs.is_zero()) {
      for (const Rat& s0 : rational_roots(hs)) {
        std::vector<MPoly> at;
        for (const auto& c : cs) at.push_back(c.substitute({{S, MPoly(s0)}}));
        MPoly gt = detail::gcd_all(at);
        if (gt.is_zero()) continue;
        for (const Rat& t0 : rational_roots(gt)) cands.push_back(line(s0, t0));
      }
    }
  }

  // chart x = c
  std::vector<MPoly> ns;
  for (auto& c : field.N().coefficients_in(Var::y)) ns.push_back(c);
  MPoly gx = detail::gcd_all(ns);
  for (const Rat& c0 : rational_roots(gx)) cands.push_back(x - MPoly(c0));

  for (auto& c : cands) {
    MPoly n = c.normalized().with_ring(Ring::xy());
    if (std::find(res.lines.begin(), res.lines.end(), n) != res.lines.end()) continue;
    if (darboux_check(field, n)) res.lines.push_back(n);
  }
  std::sort(res.lines.begin(), res.lines.end(), [](const MPoly& a, const MPoly& b) { return a.str() < b.str(); });
  return res;
}

}  // namespace lps
