#include <gtest/gtest.h>

#include "lps/fixtures.hpp"
#include "lps/report.hpp"
#include "lps/synthetic.hpp"
#include "test_support.hpp"

using namespace lps;
using namespace lps::testing;

namespace {

SolveRequest request(const std::string& text, int order = 1) {
  SolveRequest req;
  req.ode = parse_ode(text, order);
  return req;
}

}  // namespace

TEST(Render, Examples) {
  EXPECT_EQ(render(X + Y), "x + y");
  EXPECT_EQ(render(MPoly()), "0");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    MPoly p = random_poly(rng, 3, 4, 6, 7, true);
    EXPECT_EQ(parse_poly(render(p)), p);
  }
}

TEST(Render, OdeEchoParsesBack) {
  for (const auto& f : builtin_fixtures()) {
    auto ode = parse_ode(f.text, f.order);
    const std::string s = ode_string(ode);
    EXPECT_EQ(ode_order_from_text(s), f.order);
    auto again = parse_ode(s, f.order);
    EXPECT_EQ(again.M, ode.M);
    EXPECT_EQ(again.N, ode.N);
  }
}

TEST(Solve, RadialField) {
  auto r = solve(request("y' = y/x"));
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.method, "lps");
  EXPECT_EQ(r.degree_found, 2);
  EXPECT_TRUE(all_verified(r));
  ASSERT_TRUE(r.first_integral);
  EXPECT_TRUE(*r.integral);
  auto j = to_json(r);
  for (const char* key : {"ode", "method", "degree_found", "v", "darboux", "first_integral", "verified", "timings_ms"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_FALSE(j.contains("diagnostics"));
  EXPECT_TRUE(to_json(r, true).contains("diagnostics"));
}

TEST(Solve, NotFoundReport) {
  auto req = request(find_fixture("eq9")->text);
  req.max_degree = 6;
  auto r = solve(req);
  EXPECT_FALSE(r.found);
  auto j = to_json(r);
  EXPECT_TRUE(j["v"].is_null());
  EXPECT_TRUE(j["degree_found"].is_null());
  EXPECT_TRUE(j["first_integral"].is_null());
  EXPECT_NE(render_text(r).find("not found"), std::string::npos);
}

TEST(Solve, ExplicitDenominator) {
  auto req = request(find_fixture("eq8")->text);
  req.denominator = X + Y;
  auto r = solve(req);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.method, "lps-denominator");
  EXPECT_EQ(r.kind, IifKind::rational);
  EXPECT_EQ(r.v_den, X + Y);
  EXPECT_TRUE(all_verified(r));
  EXPECT_EQ(factored_string(r), "(x^3*y + 2*x^2*y^2 + x*y^3 - 1)^2 / ((x + y))");
}

TEST(Solve, RejectsInvalidRequests) {
  auto two = request("y'' = z", 2);
  two.power = 2;
  EXPECT_THROW(solve(two), std::invalid_argument);
  auto neg = request("y' = y/x");
  neg.max_degree = -1;
  EXPECT_THROW(solve(neg), std::invalid_argument);
  auto zero = request("y' = y/x");
  zero.denominator = MPoly();
  EXPECT_THROW(solve(zero), std::invalid_argument);
}

TEST(Synthetic, PlantedRadialExample) {
  DarbouxFirstIntegral I;
  I.factors = {{X, Rat(1)}, {Y, Rat(-1)}};
  auto c = synthesize(I);
  ASSERT_TRUE(c);
  EXPECT_TRUE(c->general_position);
  EXPECT_EQ(c->planted_v, X * Y);
  EXPECT_EQ(c->ode.rhs(), RatFunc(Y, X));
  auto o = try_recover(*c);
  EXPECT_TRUE(o.found);
  EXPECT_TRUE(o.identity_holds);
  EXPECT_TRUE(o.recovered);
}

TEST(Synthetic, ExponentialPartGivesUniqueFactor) {
  // I = exp(x/y) (x + 1): planted V = y^2 (x + 1)
  DarbouxFirstIntegral I;
  I.A = X;
  I.B = Y;
  I.factors = {{X + C(1), Rat(1)}};
  auto c = synthesize(I);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->planted_v, Y * Y * (X + C(1)));
  auto o = try_recover(*c);
  EXPECT_TRUE(o.divides);
  EXPECT_EQ(o.degree_found, 3);
}

TEST(Synthetic, DegenerateIntegralsAreSkipped) {
  DarbouxFirstIntegral onlyx;
  onlyx.factors = {{X, Rat(1)}};
  EXPECT_FALSE(synthesize(onlyx));
  EXPECT_FALSE(synthesize(DarbouxFirstIntegral{}));
}

TEST(Synthetic, RandomCasesSatisfyIdentity) {
  std::mt19937_64 rng(31);
  int cases = 0, general = 0, recovered = 0;
  while (cases < 60) {
    auto c = synthesize(random_darboux_integral(rng));
    if (!c) continue;
    ++cases;
    // the planted V solves the PDE whenever Pol_x, Pol_y are coprime
    if (c->general_position) {
      EXPECT_TRUE(check_inverse_integrating_factor(c->ode, c->planted_v));
    }
    auto o = try_recover(*c);
    ASSERT_TRUE(o.found);
    EXPECT_TRUE(o.identity_holds);
    general += c->general_position;
    recovered += c->general_position && o.recovered;
  }
  EXPECT_GE(recovered * 100, 95 * general);
}
