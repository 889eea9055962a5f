#pragma once

#include <optional>
#include <random>
#include <vector>

#include "lps/darboux.hpp"
#include "lps/lps.hpp"
#include "lps/verify.hpp"

namespace lps {

/// A first-order ODE built so that a chosen I = exp(A/B) prod p_j^n_j is a
/// first integral: M = -Pol_x / g, N = Pol_y / g with g = gcd(Pol_x, Pol_y).
struct SyntheticCase {
  DarbouxFirstIntegral planted;
  RationalODE ode;
  PolPair pols;
  MPoly planted_v;  // B^2 prod p_j
  bool general_position = false;
};

inline std::optional<SyntheticCase> synthesize(const DarbouxFirstIntegral& I) {
  SyntheticCase c;
  c.planted = I;
  c.pols = compute_pol_pair(I);
  if (c.pols.pol_x.is_zero() || c.pols.pol_y.is_zero()) return std::nullopt;
  const MPoly g = gcd(c.pols.pol_x, c.pols.pol_y);
  c.general_position = g.is_constant();
  c.ode = RationalODE::from_rhs(1, RatFunc(-c.pols.pol_x, c.pols.pol_y));
  if (c.ode.N.is_constant() && c.ode.M.is_constant()) return std::nullopt;
  MPoly v = I.B * I.B;
  for (const auto& [p, n] : I.factors)
    if (!n.is_zero()) v *= p;
  c.planted_v = v.normalized().with_ring(Ring::xy());
  return c;
}

struct SyntheticOptions {
  int max_factors = 3;
  int factor_degree = 2;
  int coeff_range = 3;
  double exponential_probability = 0.8;
};

namespace detail {

inline MPoly random_bivariate(std::mt19937_64& rng, int max_degree, int coeff_range, bool nonconstant) {
  std::uniform_int_distribution<int> c(-coeff_range, coeff_range), d(nonconstant ? 1 : 0, max_degree);
  while (true) {
    const int deg = d(rng);
    MPoly p;
    for (Monomial m : candidate_monomials(Ring::xy(), deg))
      if (int k = c(rng); k != 0) p += MPoly::monomial(m, Rat(k), Ring::xy());
    if (p.is_zero() || (nonconstant && p.is_constant())) continue;
    return p;
  }
}

}  // namespace detail

/// Random (p_j, n_j, A, B) with irreducible, pairwise distinct p_j and
/// coprime A, B.
inline DarbouxFirstIntegral random_darboux_integral(std::mt19937_64& rng, const SyntheticOptions& o = {}) {
  static const Rat exps[] = {Rat(1), Rat(-1), Rat(2), Rat(-2), Rat(3), Rat(Int(1), Int(2)), Rat(Int(-3), Int(2))};
  std::uniform_int_distribution<int> nf(1, o.max_factors), pick(0, 6);
  std::bernoulli_distribution with_exp(o.exponential_probability), const_b(0.3);
  DarbouxFirstIntegral I;
  const int count = nf(rng);
  while (static_cast<int>(I.factors.size()) < count) {
    MPoly p = detail::random_bivariate(rng, o.factor_degree, o.coeff_range, true).normalized();
    auto f = factor_multivariate(p);
    if (f.factors.size() != 1 || f.factors[0].second != 1) continue;
    bool dup = false;
    for (const auto& [q, n] : I.factors) dup = dup || q == p;
    if (!dup) I.factors.emplace_back(p, exps[pick(rng)]);
  }
  if (with_exp(rng)) {
    MPoly A = detail::random_bivariate(rng, 2, o.coeff_range, true);
    MPoly B = const_b(rng) ? MPoly(Rat(1), Ring::xy())
                           : detail::random_bivariate(rng, 1, o.coeff_range, true);
    RatFunc q(A, B);
    I.A = q.num();
    I.B = q.den();
  }
  return I;
}

struct RecoveryOutcome {
  bool found = false;
  bool identity_holds = false;
  bool divides = false;    // planted V divides the selected V
  bool in_kernel = false;  // planted V lies in the kernel at its own degree
  bool recovered = false;
  int degree_found = -1;
};

namespace detail {

/// Whether target lies in the span of the given polynomials.
inline bool in_span(const std::vector<MPoly>& basis, const MPoly& target) {
  std::map<Monomial, int, std::greater<>> row;
  for (const auto& b : basis)
    for (const auto& t : b.terms()) row.emplace(t.mono, 0);
  for (const auto& t : target.terms())
    if (!row.count(t.mono)) return false;
  int r = 0;
  for (auto& [m, i] : row) i = r++;
  std::vector<std::vector<RatMatrix::Entry>> rows(row.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (const auto& t : basis[j].terms()) rows[row[t.mono]].emplace_back(static_cast<int>(j), t.coeff);
  for (const auto& t : target.terms()) rows[row[t.mono]].emplace_back(static_cast<int>(basis.size()), -t.coeff);
  RatMatrix m(0, static_cast<int>(basis.size()) + 1);
  for (auto& e : rows) m.add_row(std::move(e));
  for (const auto& v : nullspace(m))
    if (!v.back().is_zero()) return true;
  return false;
}

}  // namespace detail

/// Runs the search up to the planted degree and checks the planted V. When
/// the selected V is not a multiple of it, the kernel of the degree-D system
/// (D = deg of the planted V) is computed and searched for it; this is the
/// situation of a rational first integral, where V is unique only up to a
/// function of that integral.
inline RecoveryOutcome try_recover(const SyntheticCase& c) {
  RecoveryOutcome out;
  SearchOptions opts;
  opts.max_degree = c.planted_v.degree();
  auto r = lps_search(c.ode, opts);
  if (!r) return out;
  out.found = true;
  out.degree_found = r->degree_found;
  out.identity_holds = check_inverse_integrating_factor(c.ode, r->V_num, r->V_den, r->k);
  out.divides = static_cast<bool>(exact_divide(r->V_num, c.planted_v));
  if (out.divides || detail::in_span(r->basis, c.planted_v)) {
    out.in_kernel = true;
  } else {
    const int D = c.planted_v.degree();
    const auto cols = candidate_monomials(Ring::xy(), D);
    std::vector<MPoly> basis;
    for (const auto& v : nullspace(assemble_lps_system(build_field(c.ode), D)))
      basis.push_back(polynomial_from_vector(cols, v, Ring::xy()));
    out.in_kernel = detail::in_span(basis, c.planted_v);
  }
  out.recovered = out.divides || out.in_kernel;
  return out;
}

}  // namespace lps
