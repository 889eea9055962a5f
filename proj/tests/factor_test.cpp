#include <gtest/gtest.h>

#include <random>

#include "lps/factor.hpp"
#include "lps/fixtures.hpp"
#include "lps/parser.hpp"
#include "test_support.hpp"

using namespace lps;
using namespace lps::testing;

namespace {

bool same_factors(const Factorization& f, std::vector<std::pair<MPoly, int>> want) {
  if (f.factors.size() != want.size()) return false;
  for (auto& [p, m] : want) {
    MPoly n = p.normalized();
    auto it = std::find_if(f.factors.begin(), f.factors.end(), [&](const auto& e) { return e.first == n; });
    if (it == f.factors.end() || it->second != m) return false;
  }
  return true;
}

/// Irreducible by construction: degree 1, or an Eisenstein polynomial at 2
/// with a randomized shape. Shifts keep irreducibility.
MPoly random_irreducible_univariate(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree), c(-4, 4), shift(-3, 3);
  const int d = deg(rng);
  if (d == 1) {
    int a = c(rng);
    if (a == 0) a = 1;
    return X * C(a) + C(c(rng));
  }
  std::vector<Term> terms;
  int lead = 2 * c(rng) + 1;
  terms.push_back({Monomial::var(Var::x, d), Rat(lead)});
  for (int i = 1; i < d; ++i) terms.push_back({Monomial::var(Var::x, i), Rat(2 * c(rng))});
  terms.push_back({Monomial(), Rat(2 * (2 * c(rng) + 1))});
  MPoly e = MPoly::from_terms(terms);
  return e.substitute({{Var::x, X + C(shift(rng))}});
}

}  // namespace

TEST(FactorUnivariate, Examples) {
  auto f = factor_univariate(X.pow(4) - C(1));
  EXPECT_TRUE(same_factors(f, {{X - C(1), 1}, {X + C(1), 1}, {X * X + C(1), 1}}));
  EXPECT_EQ(f.expand(), X.pow(4) - C(1));

  auto g = factor_univariate(X * X + C(1));
  EXPECT_TRUE(same_factors(g, {{X * X + C(1), 1}}));

  auto h = factor_univariate(C(-6) * X.pow(3) * (X - C(2)).pow(2));
  EXPECT_TRUE(same_factors(h, {{X, 3}, {X - C(2), 2}}));
  EXPECT_EQ(h.unit, Rat(-6));

  // Swinnerton-Dyer style: irreducible but splits modulo every prime
  MPoly sd = X.pow(4) - C(10) * X * X + C(1);
  EXPECT_TRUE(same_factors(factor_univariate(sd), {{sd, 1}}));

  auto y = factor_univariate(Y * Y - C(4));
  EXPECT_TRUE(same_factors(y, {{Y - C(2), 1}, {Y + C(2), 1}}));
  EXPECT_EQ(factor_univariate(C(5)).unit, Rat(5));
  EXPECT_THROW(factor_univariate(MPoly()), std::invalid_argument);
  EXPECT_THROW(factor_univariate(X * Y), std::invalid_argument);
}

TEST(FactorUnivariate, RecoversRandomProducts) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 1000; ++i) {
    std::vector<MPoly> parts;
    for (int k = 0; k < 3; ++k) parts.push_back(random_irreducible_univariate(rng, 4));
    MPoly p = parts[0] * parts[1] * parts[2] * Rat(Int(i % 5 + 1), Int(i % 3 + 1));
    auto f = factor_univariate(p);
    ASSERT_EQ(f.expand(), p);
    std::vector<std::pair<MPoly, int>> want;
    for (const auto& q : parts) {
      MPoly n = q.normalized();
      auto it = std::find_if(want.begin(), want.end(), [&](const auto& e) { return e.first == n; });
      if (it == want.end()) {
        want.emplace_back(n, 1);
      } else {
        ++it->second;
      }
    }
    ASSERT_TRUE(same_factors(f, want)) << p.str();
  }
}

TEST(FactorMultivariate, Examples) {
  EXPECT_TRUE(same_factors(factor_multivariate(X * X - Y * Y), {{X - Y, 1}, {X + Y, 1}}));

  MPoly vp = (X - C(3) * Y.pow(3)).pow(2) * (Y.pow(7) + X * X);
  auto f = factor_multivariate(vp);
  EXPECT_TRUE(same_factors(f, {{X - C(3) * Y.pow(3), 2}, {Y.pow(7) + X * X, 1}}));
  EXPECT_EQ(f.expand(), vp);

  MPoly a = Y * Y * Z - Y * Y + Z;
  MPoly b = X * X * Y * Y * Z - C(2) * X * Y.pow(3) * Z + Y.pow(4) * Z - X * X * Y * Y + C(2) * X * Y.pow(3) -
            Y.pow(4) + X * X * Z - Y * Y * Z - C(2) * X * Y + C(2) * Y * Y + Y * Z - Y + C(2) * Z - C(2);
  auto g = factor_multivariate(a * b * b);
  EXPECT_TRUE(same_factors(g, {{a, 1}, {b, 2}}));

  EXPECT_TRUE(same_factors(factor_multivariate(X * Y * (X + Y + C(1))), {{X, 1}, {Y, 1}, {X + Y + C(1), 1}}));
  MPoly irr = X * X + Y * Y + C(1);
  EXPECT_TRUE(same_factors(factor_multivariate(irr), {{irr, 1}}));
  EXPECT_TRUE(same_factors(factor_multivariate((X + C(1)) * (Y - C(2))), {{X + C(1), 1}, {Y - C(2), 1}}));
}

TEST(FactorMultivariate, RoundTripAndRecoveryRandomized) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> mult(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const int nvars = 2 + i % 2;
    MPoly p(Rat(Int(1 + i % 4), Int(1 + i % 5)));
    std::vector<MPoly> parts;
    for (int k = 0; k < 1 + i % 3; ++k) {
      MPoly q = random_nonconstant(rng, nvars, 2, 3);
      parts.push_back(q);
      p *= q.pow(mult(rng));
    }
    auto f = factor_multivariate(p);
    ASSERT_EQ(f.expand(), p);
    // every planted part is a product of reported factors
    for (const auto& q : parts) {
      MPoly rest = q;
      for (const auto& [g, m] : f.factors)
        while (auto d = exact_divide(rest, g)) rest = *d;
      ASSERT_TRUE(rest.is_constant()) << q.str();
    }
    // reported factors are normalized and pairwise distinct
    for (std::size_t a = 0; a < f.factors.size(); ++a) {
      ASSERT_GT(f.factors[a].first.leading_coeff().sign(), 0);
      for (std::size_t b = a + 1; b < f.factors.size(); ++b) ASSERT_NE(f.factors[a].first, f.factors[b].first);
    }
  }
}

TEST(FactorMultivariate, AgreesWithUnivariateSpecialization) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 100; ++i) {
    MPoly p = random_nonconstant(rng, 2, 2, 3) * random_nonconstant(rng, 2, 2, 3);
    auto f = factor_multivariate(p);
    const Rat y0(7 + i);
    MPoly spec = p.substitute({{Var::y, MPoly(y0)}});
    if (spec.is_constant()) continue;
    // the specialization of each multivariate factor is a product of
    // univariate factors of the specialized polynomial
    auto u = factor_univariate(spec);
    int uni_count = 0, multi_count = 0;
    for (const auto& [g, m] : u.factors) uni_count += m;
    for (const auto& [g, m] : f.factors) {
      MPoly gs = g.substitute({{Var::y, MPoly(y0)}});
      if (!gs.is_constant()) multi_count += m;
    }
    EXPECT_LE(multi_count, uni_count);
    EXPECT_EQ(f.expand().substitute({{Var::y, MPoly(y0)}}), u.expand());
  }
}

TEST(Darboux, CheckExamples) {
  auto radial = build_field(parse_ode("y' = y/x", 1));
  auto a = darboux_check(radial, X);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->q, C(1));
  auto b = darboux_check(radial, X + Y);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->q, C(1));
  EXPECT_FALSE(darboux_check(radial, X + C(1)));
  EXPECT_THROW(darboux_check(radial, C(3)), std::invalid_argument);

  auto eq5 = build_field(parse_ode(find_fixture("eq5")->text, 1));
  for (const MPoly& p : {X - C(3) * Y.pow(3), Y.pow(7) + X * X}) {
    auto d = darboux_check(eq5, p);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->q * p, eq5.apply_cleared(p));
    EXPECT_LE(d->q.degree(), std::max(eq5.M().degree(), eq5.N().degree()) - 1);
  }
  // cofactors add up under multiplication
  MPoly p1 = X - C(3) * Y.pow(3), p2 = Y.pow(7) + X * X;
  EXPECT_EQ(darboux_check(eq5, p1 * p2)->q, darboux_check(eq5, p1)->q + darboux_check(eq5, p2)->q);
}

TEST(Darboux, SecondOrderClearedField) {
  auto f = build_field(parse_ode("y'' = z", 2));
  auto d = darboux_check(f, Z);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->q, C(1));
}

TEST(Degree1Search, FindsLineOfKnownDenominatorExample) {
  auto f = build_field(parse_ode(find_fixture("eq8")->text, 1));
  auto r = degree1_dp_search(f);
  EXPECT_FALSE(r.family());
  EXPECT_NE(std::find(r.lines.begin(), r.lines.end(), X + Y), r.lines.end());
  for (const auto& p : r.lines) EXPECT_TRUE(darboux_check(f, p));
}

TEST(Degree1Search, RadialFieldIsAFamily) {
  auto f = build_field(parse_ode("y' = y/x", 1));
  auto r = degree1_dp_search(f);
  EXPECT_TRUE(r.family());
  for (const MPoly& want : {X, Y, X + Y, Y - X}) {
    EXPECT_NE(std::find(r.lines.begin(), r.lines.end(), want.normalized()), r.lines.end()) << want.str();
  }
  // no line off the origin
  for (const auto& p : r.lines) EXPECT_TRUE(p.coeff(Monomial()).is_zero());
}

TEST(Degree1Search, IsolatedLinesRandomized) {
  // fields with planted invariant lines: X(l) = q l
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> c(-3, 3);
  for (int i = 0; i < 60; ++i) {
    MPoly l1 = Y - X * C(c(rng)) - C(c(rng));
    MPoly l2 = X - C(c(rng));
    // N = l2 * a, M = l1 * b + s * N keeps y - s x - t invariant
    MPoly a = random_nonconstant(rng, 2, 2, 3), b = random_nonconstant(rng, 2, 2, 3);
    const Rat s = -l1.coeff(Monomial::var(Var::x));
    MPoly N = l2 * a;
    MPoly M = l1 * b + N * s;
    auto ode = RationalODE::from_rhs(1, RatFunc(M, N));
    if (ode.N.is_constant()) continue;
    auto f = build_field(ode);
    auto r = degree1_dp_search(f);
    for (const auto& p : r.lines) ASSERT_TRUE(darboux_check(f, p));
    if (r.family()) continue;
    for (const MPoly& want : {l1, l2}) {
      if (!darboux_check(f, want)) continue;  // cancellation in M/N can remove it
      EXPECT_NE(std::find(r.lines.begin(), r.lines.end(), want.normalized()), r.lines.end())
          << want.str() << " in " << M.str() << " / " << N.str();
    }
  }
}

TEST(Resultant, MatchesKnownValues) {
  using detail::RatPoly;
  // Res(x^2 - 1, x - 2) = 3 ; Res(x^2 - 1, x - 1) = 0
  EXPECT_EQ(detail::resultant(RatPoly{-1, 0, 1}, RatPoly{-2, 1}), Rat(3));
  EXPECT_EQ(detail::resultant(RatPoly{-1, 0, 1}, RatPoly{-1, 1}), Rat(0));
  // Res_y(y^2 - x, y - x) = x^2 - x
  EXPECT_EQ(detail::resultant_in(Y * Y - X, Y - X, Var::y, Var::x), X * X - X);
}

TEST(RationalRoots, Examples) {
  auto r = rational_roots(C(6) * X.pow(3) - C(7) * X * X + C(1));
  // 6x^3 - 7x^2 + 1 = (x - 1)(2x - 1)(3x + 1)
  EXPECT_EQ(r, (std::vector<Rat>{Rat(Int(-1), Int(3)), Rat(Int(1), Int(2)), Rat(1)}));
  EXPECT_TRUE(rational_roots(X * X + C(2)).empty());
}
