// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "lps/darboux.hpp"
#include "lps/fixtures.hpp"
#include "lps/report.hpp"
#include "lps/synthetic.hpp"
#include "lps/verify.hpp"
#include "test_support.hpp"

using namespace lps;
using namespace lps::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

RationalODE fixture_ode(const char* name) {
  auto f = find_fixture(name);
  return parse_ode(f->text, f->order);
}

MPoly P(const char* text) { return parse_poly(text).normalized(); }

bool same_factor_list(std::vector<std::pair<MPoly, int>> got, std::vector<std::pair<MPoly, int>> want) {
  auto key = [](const auto& a, const auto& b) { return a.first.str() < b.first.str(); };
  std::sort(got.begin(), got.end(), key);
  std::sort(want.begin(), want.end(), key);
  return got == want;
}

SolveReport run(const char* name, std::function<void(SolveRequest&)> tweak = {}) {
  auto f = find_fixture(name);
  SolveRequest req;
  req.ode = parse_ode(f->text, f->order);
  req.max_degree = f->max_degree;
  req.power = f->power;
  req.auto_denominator = f->auto_denominator;
  if (tweak) tweak(req);
  return solve(req);
}

double total_ms(const SolveReport& r) {
  for (const auto& [phase, ms] : r.timings)
    if (phase == "total") return ms;
  return 0;
}

Outcome quintic_example() {
  Outcome o;
  auto r = run("eq5", [](SolveRequest& q) { q.max_degree = 15; });
  o.require(r.found, "found");
  if (!r.found) return o;
  o.require(r.degree_found == 13, "degree 13");
  o.require(r.v_num == P("(x-3*y^3)^2*(y^7+x^2)"), "V equals (x-3y^3)^2 (y^7+x^2)");
  o.require(r.v_den == MPoly(Rat(1), Ring::xy()), "polynomial V");
  o.require(r.unit == Rat(1) && same_factor_list(r.factored, {{P("x-3*y^3"), 2}, {P("y^7+x^2"), 1}}),
            "factors with multiplicities (2, 1)");
  o.require(inverse_integrating_factor_residual(r.ode, r.v_num, r.v_den, 1).is_zero(), "zero PDE residual");
  o.detail << "degree " << r.degree_found << ", V = " << factored_string(r) << ", " << std::fixed
           << std::setprecision(1) << total_ms(r) << " ms";
  return o;
}

Outcome jacobi_example() {
  Outcome o;
  auto r = run("eq7", [](SolveRequest& q) { q.max_degree = 15; });
  o.require(r.found, "found");
  if (!r.found) return o;
  const MPoly a = P("y^2*z-y^2+z");
  const MPoly b = P("x^2*y^2*z-2*x*y^3*z+y^4*z-x^2*y^2+2*x*y^3-y^4+x^2*z-y^2*z-2*x*y+2*y^2+y*z-y+2*z-2");
  o.require(r.v_num == (a * b * b).normalized(), "P_J equals the printed product");
  o.require(same_factor_list(r.factored, {{a, 1}, {b, 2}}), "two factors");
  const VectorField field = build_field(r.ode);
  o.require(darboux_check(field, a) && darboux_check(field, b), "both factors are Darboux polynomials");
  o.require(check_jacobi_multiplier(r.ode, r.v_num), "inverse Jacobi multiplier identity");
  o.detail << "degree " << r.degree_found << ", " << r.attempts.back().unknowns << " unknowns, " << std::fixed
           << std::setprecision(1) << total_ms(r) << " ms";
  return o;
}

Outcome known_denominator() {
  Outcome o;
  const RationalODE ode = fixture_ode("eq8");
  SearchOptions plain;
  plain.max_degree = 20;
  o.require(!lps_search(ode, plain), "plain search finds nothing up to degree 20");
  auto dp = degree1_dp_search(build_field(ode));
  const MPoly line = P("x+y");
  o.require(std::find(dp.lines.begin(), dp.lines.end(), line) != dp.lines.end(), "degree-one search finds x+y");
  auto r = run("eq8", [](SolveRequest& q) { q.auto_denominator = true; });
  o.require(r.found && r.method == "lps-denominator", "rerun with the denominator succeeds");
  if (!r.found) return o;
  o.require(r.v_num == P("(x^3*y+2*x^2*y^2+x*y^3-1)^2"), "V numerator");
  o.require(r.v_den == line, "V denominator x+y");
  o.require(check_inverse_integrating_factor(ode, r.v_num, r.v_den), "PDE identity");
  o.detail << "degree-one Darboux polynomials:";
  for (const auto& l : dp.lines) o.detail << " " << l.str();
  o.detail << "; V = " << factored_string(r);
  return o;
}

Outcome power_variant() {
  Outcome o;
  const RationalODE ode = fixture_ode("eq9");
  SearchOptions k1;
  k1.max_degree = 20;
  o.require(!lps_search(ode, k1), "k = 1 finds nothing up to degree 20");
  const MPoly want = P("(x*y^2-1)^3*(x*y^2+1)^3");
  auto r = run("eq9", [](SolveRequest& q) { q.power = 2; });
  o.require(r.found && r.kind == IifKind::kth_root && r.k == 2, "k = 2 gives a k-th root factor");
  if (r.found) o.require(r.v_num == want, "V^2 equals (xy^2-1)^3 (xy^2+1)^3");
  auto sweep = run("eq9", [](SolveRequest& q) {
    q.power = 1;
    q.power_sweep = 2;
  });
  o.require(sweep.found && sweep.k == 2 && sweep.v_num == want, "power sweep reaches the same result");
  if (r.found) o.detail << "k = " << r.k << ", V^k = " << factored_string(r);
  return o;
}

struct SyntheticRun {
  std::vector<SyntheticCase> cases;
  std::vector<RecoveryOutcome> outcomes;
};

const SyntheticRun& synthetic_run() {
  static const SyntheticRun run = [] {
    SyntheticRun s;
    std::mt19937_64 rng(20240601);
    while (s.cases.size() < 200) {
      auto c = synthesize(random_darboux_integral(rng));
      if (!c) continue;
      s.outcomes.push_back(try_recover(*c));
      s.cases.push_back(std::move(*c));
    }
    return s;
  }();
  return run;
}

Outcome pde_identity_property() {
  Outcome o;
  // fixtures
  auto e5 = run("eq5");
  auto e7 = run("eq7");
  auto e8 = run("eq8");
  auto e9 = run("eq9");
  o.require(e5.found && inverse_integrating_factor_residual(e5.ode, e5.v_num, e5.v_den, e5.k).is_zero(), "eq5");
  o.require(e7.found && jacobi_multiplier_residual(e7.ode, e7.v_num).is_zero(), "eq7");
  o.require(e8.found && inverse_integrating_factor_residual(e8.ode, e8.v_num, e8.v_den, e8.k).is_zero(), "eq8");
  o.require(e9.found && inverse_integrating_factor_residual(e9.ode, e9.v_num, e9.v_den, e9.k).is_zero(), "eq9");
  // synthetic
  const auto& s = synthetic_run();
  int general = 0, recovered = 0, divides = 0, residual_ok = 0, found = 0, misses = 0, misses_with_gcd = 0;
  for (std::size_t i = 0; i < s.cases.size(); ++i) {
    const auto& c = s.cases[i];
    const auto& r = s.outcomes[i];
    found += r.found;
    residual_ok += r.found && r.identity_holds;
    if (c.general_position) {
      ++general;
      recovered += r.recovered;
      divides += r.divides;
    }
    if (!r.recovered) {
      ++misses;
      misses_with_gcd += !c.pols.coprime;
    }
  }
  o.require(residual_ok == found && found == static_cast<int>(s.cases.size()), "identity on every synthetic V");
  o.require(general > 0 && recovered * 100 >= 95 * general, "recovery rate >= 95%");
  o.require(misses == misses_with_gcd, "every miss has gcd(Pol_x, Pol_y) nontrivial");
  o.detail << "4 fixtures; " << s.cases.size() << " synthetic ODEs, identity exact for " << residual_ok << "; "
           << recovered << "/" << general << " general-position cases recovered (" << divides
           << " divide the selected V, the rest lie in the kernel at the planted degree); " << misses
           << " misses, " << misses_with_gcd << " with a common factor";
  return o;
}

Outcome first_integral_property() {
  Outcome o;
  int reconstructed = 0, verified = 0, pol_ok = 0, general = 0, failures = 0;
  auto check = [&](const RationalODE& ode, const InverseIntegratingFactor& V) {
    const VectorField field = build_field(ode);
    Reconstruction rec;
    try {
      rec = reconstruct_first_integral(field, V);
    } catch (const InternalError&) {
      ++failures;
      return;
    }
    if (!rec.integral) return;
    ++reconstructed;
    verified += verify_first_integral(field, *rec.integral);
    auto pp = compute_pol_pair(*rec.integral);
    if (!pp.coprime) return;
    ++general;
    pol_ok += RatFunc(-pp.pol_x, pp.pol_y) == RatFunc(ode.M, ode.N);
  };
  for (const char* name : {"eq5", "eq8"}) {
    auto r = run(name);
    InverseIntegratingFactor V;
    V.V_num = r.v_num;
    V.V_den = r.v_den;
    V.k = r.k;
    check(r.ode, V);
  }
  check(parse_ode("y' = y/x", 1), *lps_search(parse_ode("y' = y/x", 1)));
  const auto& s = synthetic_run();
  for (std::size_t i = 0; i < s.cases.size(); ++i) {
    if (!s.outcomes[i].found) continue;
    SearchOptions opts;
    opts.max_degree = s.cases[i].planted_v.degree();
    check(s.cases[i].ode, *lps_search(s.cases[i].ode, opts));
  }
  o.require(failures == 0, "no reconstruction fails its own check");
  o.require(reconstructed > 0 && verified == reconstructed, "X(I) = 0 for every reconstructed I");
  o.require(general > 0 && pol_ok == general, "-Pol_x/Pol_y = M/N");
  o.detail << reconstructed << " first integrals reconstructed and verified " << verified << "; " << pol_ok << "/"
           << general << " coprime Pol pairs give -Pol_x/Pol_y = M/N";
  return o;
}

Outcome algebra_kernel_property() {
  Outcome o;
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> mult(1, 3);
  int fact = 0, gcds = 0, sqf = 0, kernels = 0;
  for (int i = 0; i < 1000; ++i) {
    MPoly p(Rat(Int(1 + i % 4), Int(1 + i % 5)));
    for (int k = 0; k < 1 + i % 3; ++k) p *= random_nonconstant(rng, 1 + i % 3, 2, 3).pow(mult(rng) % 2 + 1);
    auto f = factor_multivariate(p);
    bool ok = f.expand() == p;
    for (const auto& [q, m] : f.factors) ok = ok && q == q.normalized() && m >= 1;
    fact += ok;
  }
  for (int i = 0; i < 1000; ++i) {
    MPoly f = random_nonconstant(rng, 3, 3, 4), g = random_nonconstant(rng, 3, 3, 4), h = random_nonconstant(rng, 3, 3, 4);
    MPoly a = f * g, b = f * h, d = gcd(a, b);
    gcds += exact_divide(a, d) && exact_divide(b, d) && exact_divide(d, f);
  }
  for (int i = 0; i < 1000; ++i) {
    MPoly p(Rat(Int(i % 7 + 1), Int(i % 3 + 1)));
    for (int k = 0; k < 1 + i % 3; ++k) p *= random_nonconstant(rng, 3, 2, 3).pow(mult(rng));
    auto d = squarefree_decompose(p);
    bool ok = d.expand() == p;
    for (std::size_t k = 0; k < d.parts.size(); ++k) {
      const MPoly& q = d.parts[k].factor;
      // square-free iff gcd(q, q_x, q_y, q_z) is constant
      MPoly g = q;
      for (Var v : {Var::x, Var::y, Var::z})
        if (q.degree(v) > 0) g = gcd(g, q.derivative(v));
      ok = ok && g.is_constant();
      for (std::size_t j = 0; j < k; ++j) ok = ok && gcd(q, d.parts[j].factor).is_constant();
    }
    sqf += ok;
  }
  std::uniform_int_distribution<int> dim(1, 10), val(-5, 5);
  std::bernoulli_distribution dense(0.5);
  for (int i = 0; i < 1000; ++i) {
    const int rows = dim(rng), cols = dim(rng);
    std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(cols, Rat(0)));
    for (auto& row : a)
      for (auto& x : row)
        if (dense(rng)) x = Rat(Int(val(rng)), Int(1 + (i % 3)));
    // duplicate rows to force nontrivial kernels
    if (rows > 1) a[rows - 1] = a[0];
    RatMatrix m = RatMatrix::dense(a);
    const auto exact = nullspace(m, {NullspaceStrategy::Exact, 1});
    const auto modular = nullspace(m, {NullspaceStrategy::Modular, 1});
    bool ok = exact == modular;
    for (const auto& v : exact) ok = ok && m.multiply(v) == RatVector(rows, Rat(0));
    kernels += ok;
  }
  o.require(fact == 1000, "factorization round trip");
  o.require(gcds == 1000, "gcd divisibility");
  o.require(sqf == 1000, "square-free round trip");
  o.require(kernels == 1000, "nullspace residuals");
  o.detail << "factorization " << fact << "/1000, gcd " << gcds << "/1000, square-free " << sqf
           << "/1000, nullspace " << kernels << "/1000, all exact";
  return o;
}

Outcome divergence_relation() {
  Outcome o;
  auto r = run("eq5");
  o.require(r.found && r.v_den == MPoly(Rat(1), Ring::xy()), "polynomial V");
  if (!r.found) return o;
  const VectorField field = build_field(r.ode);
  // 1/V = prod p_i^(-m_i): exponents are the negated multiplicities
  MPoly lhs = field.polynomial_divergence();
  std::ostringstream ns;
  for (const auto& [p, m] : r.factored) {
    auto d = darboux_check(field, p);
    o.require(d.has_value(), "factor is a Darboux polynomial");
    if (!d) return o;
    lhs += d->q * Rat(-m);
    ns << (ns.tellp() ? ", " : "") << -m;
  }
  o.require(lhs.is_zero(), "sum n_i q_i + N_x + M_y = 0");
  o.detail << "n = (" << ns.str() << "), residual " << lhs.str();
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"quintic example: degree 13, V = (x-3y^3)^2 (y^7+x^2)", quintic_example},
      {"second-order example: P_J and its two Darboux factors", jacobi_example},
      {"known denominator: NotFound, x+y, then V_num", known_denominator},
      {"k-th power: NotFound at k=1, V^2 at k=2", power_variant},
      {"PDE identity on fixtures and synthetic ODEs", pde_identity_property},
      {"first integrals verify and reproduce M/N", first_integral_property},
      {"algebra kernel round trips (1000 each)", algebra_kernel_property},
      {"divergence relation for the quintic example", divergence_relation},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << index << ": " << c.title << " -- " << o.detail.str()
              << " (" << std::fixed << std::setprecision(2) << s << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
