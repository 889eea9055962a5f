// lps: command-line front end.
// Exit codes: 0 ok, 1 verification false, 2 usage or parse error,
// 3 not found within bounds, 4 internal error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "lps/fixtures.hpp"
#include "lps/report.hpp"
#include "lps/synthetic.hpp"

namespace {

using namespace lps;
using nlohmann::json;

enum Exit { kOk = 0, kVerifyFalse = 1, kUsage = 2, kNotFound = 3, kInternal = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_stream(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_file(const std::string& path) {
  if (path == "-") return read_stream(std::cin);
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  return read_stream(f);
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// ODE source shared by the subcommands: inline text, "-", --file or a
/// bundled fixture name.
struct OdeInput {
  std::string arg;
  std::string file;
  int order = 1;
  CLI::Option* order_opt = nullptr;

  void add(CLI::App* app, bool required = true) {
    auto* o = app->add_option("ode", arg, "ODE text, '-' for stdin, or a fixture name (eq5, eq7, eq8, eq9)");
    app->add_option("--file", file, "read the ODE from a file");
    order_opt = app->add_option("--order", order, "ODE order (1 or 2)")->check(CLI::IsMember({1, 2}));
    if (required) o->excludes(app->get_option("--file"));
  }

  std::optional<Fixture> fixture() const { return file.empty() ? find_fixture(arg) : std::nullopt; }

  RationalODE load() const {
    std::string text;
    int ord = order;
    if (!file.empty()) {
      text = read_file(file);
    } else if (auto f = fixture()) {
      text = f->text;
      if (order_opt->count() == 0) ord = f->order;
    } else if (arg == "-") {
      text = read_stream(std::cin);
    } else if (!arg.empty()) {
      text = arg;
    } else {
      throw UsageError("no ODE given");
    }
    text = trim(text);
    if (order_opt->count() == 0 && !fixture()) ord = ode_order_from_text(text);
    return parse_ode(text, ord);
  }
};

// solve

struct SolveArgs {
  OdeInput in;
  int max_degree = 20, power = 1, power_sweep = 0;
  std::string denominator;
  bool auto_denominator = false, as_json = false, verbose = false;
  unsigned threads = 1;
  CLI::Option *max_opt = nullptr, *power_opt = nullptr, *auto_opt = nullptr;
};

SolveRequest make_request(const SolveArgs& a) {
  SolveRequest req;
  req.ode = a.in.load();
  req.max_degree = a.max_degree;
  req.power = a.power;
  req.power_sweep = a.power_sweep;
  req.auto_denominator = a.auto_denominator;
  req.threads = a.threads;
  if (auto f = a.in.fixture()) {
    if (a.max_opt->count() == 0) req.max_degree = f->max_degree;
    if (a.power_opt->count() == 0 && a.power_sweep == 0) req.power = f->power;
    if (a.auto_opt->count() == 0 && a.denominator.empty()) req.auto_denominator = f->auto_denominator;
  }
  if (!a.denominator.empty()) req.denominator = parse_poly(a.denominator, Ring::xy());
  return req;
}

int cmd_solve(const SolveArgs& a) {
  auto report = solve(make_request(a));
  if (a.as_json) {
    std::cout << to_json(report, a.verbose).dump(2) << "\n";
  } else {
    std::cout << render_text(report, a.verbose);
    std::cerr << render_timings(report) << "\n";
  }
  if (!report.found) return kNotFound;
  if (!all_verified(report)) throw InternalError("solver emitted an artifact that fails verification");
  return kOk;
}

// verify

struct VerifyArgs {
  OdeInput in;
  std::string v, report_file, A, B = "1";
  std::vector<std::string> factors;
  int power = 1;
  bool as_json = false;
};

/// X(f) for X = N d/dx + M d/dy written out from the ODE.
RatFunc apply_field(const RationalODE& ode, const RatFunc& f) {
  if (ode.order == 1) return RatFunc(ode.N) * f.derivative(Var::x) + RatFunc(ode.M) * f.derivative(Var::y);
  RatFunc phi(ode.M, ode.N);
  return f.derivative(Var::x) + RatFunc(MPoly::var(Var::z)) * f.derivative(Var::y) + phi * f.derivative(Var::z);
}

bool check_integral(const RationalODE& ode, const MPoly& A, const MPoly& B,
                    const std::vector<std::pair<MPoly, Rat>>& fs) {
  if (B.is_zero()) throw UsageError("B must be nonzero");
  RatFunc acc = apply_field(ode, RatFunc(A, B));
  bool nonconstant = !RatFunc(A, B).num().is_constant() || !RatFunc(A, B).den().is_constant();
  for (const auto& [p, n] : fs) {
    if (p.is_zero()) throw UsageError("factor must be nonzero");
    nonconstant = nonconstant || (!n.is_zero() && !p.is_constant());
    acc = acc + RatFunc(MPoly(n)) * apply_field(ode, RatFunc(p)) / RatFunc(p);
  }
  return nonconstant && acc.is_zero();
}

std::pair<MPoly, Rat> parse_factor_spec(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) throw UsageError("factor must be given as <poly>:<exponent>");
  RatFunc n = parse_ratfunc(s.substr(colon + 1));
  if (!n.num().is_constant() || !n.den().is_constant()) throw UsageError("exponent must be a rational number");
  return {parse_poly(s.substr(0, colon), Ring::xy()), n.num().constant_value() / n.den().constant_value()};
}

MPoly parse_json_poly(const json& j, Ring ring) { return parse_poly(j.get<std::string>(), ring); }

/// Rechecks every artifact of a solve report.
json verify_report(const json& rep, std::vector<std::pair<std::string, bool>>& checks) {
  const std::string ode_text = rep.at("ode").get<std::string>();
  const int order = ode_order_from_text(ode_text);
  const RationalODE ode = parse_ode(ode_text, order);
  const Ring ring = ode.ring();
  if (!rep.at("v").is_null()) {
    const auto& v = rep["v"];
    MPoly num = parse_json_poly(v.at("num"), ring), den = parse_json_poly(v.at("den"), ring);
    const int k = v.at("k").get<int>();
    bool pde = order == 1 ? check_inverse_integrating_factor(ode, num, den, k) : check_jacobi_multiplier(ode, num);
    checks.emplace_back("pde", pde);
    if (order == 1) checks.emplace_back("closedness", check_closedness(ode, num, den, k));
    RatFunc prod(MPoly(Rat(1), ring));
    for (const auto& f : v.at("factored")) {
      MPoly p = parse_json_poly(f.at(0), ring);
      int m = f.at(1).get<int>();
      for (int i = 0; i < std::abs(m); ++i) prod = m > 0 ? prod * RatFunc(p) : prod / RatFunc(p);
    }
    checks.emplace_back("factored", prod == RatFunc(num, den));
  }
  bool dps = true;
  for (const auto& d : rep.at("darboux")) {
    MPoly p = parse_json_poly(d.at("p"), ring), q = parse_json_poly(d.at("q"), ring);
    RatFunc lhs = apply_field(ode, RatFunc(p));
    if (order == 2) lhs = lhs * RatFunc(ode.N);  // cofactors refer to the field scaled by N
    dps = dps && lhs == RatFunc(q * p);
  }
  checks.emplace_back("darboux", dps);
  if (!rep.at("first_integral").is_null()) {
    const auto& I = rep["first_integral"];
    std::vector<std::pair<MPoly, Rat>> fs;
    for (const auto& f : I.at("factors"))
      fs.emplace_back(parse_json_poly(f.at(0), ring), Rat::from_string(f.at(1).get<std::string>()));
    checks.emplace_back("integral",
                        check_integral(ode, parse_json_poly(I.at("A"), ring), parse_json_poly(I.at("B"), ring), fs));
  }
  json out;
  out["ode"] = ode_string(ode);
  return out;
}

int cmd_verify(const VerifyArgs& a) {
  std::vector<std::pair<std::string, bool>> checks;
  json out;
  if (!a.report_file.empty()) {
    json rep;
    try {
      rep = json::parse(read_file(a.report_file));
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed report: ") + e.what());
    }
    try {
      out = verify_report(rep, checks);
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed report: ") + e.what());
    }
  } else {
    const RationalODE ode = a.in.load();
    out["ode"] = ode_string(ode);
    if (!a.v.empty()) {
      RatFunc V = parse_ratfunc(a.v, ode.ring());
      if (V.num().is_zero()) throw UsageError("V must be nonzero");
      if (ode.order == 1) {
        checks.emplace_back("pde", check_inverse_integrating_factor(ode, V.num(), V.den(), a.power));
      } else {
        if (!V.is_polynomial()) throw UsageError("inverse Jacobi multiplier must be a polynomial");
        checks.emplace_back("pde", check_jacobi_multiplier(ode, V.num() * V.den().constant_value().inverse()));
      }
    }
    if (!a.A.empty() || !a.factors.empty()) {
      if (ode.order != 1) throw UsageError("first integrals are checked for first-order ODEs");
      std::vector<std::pair<MPoly, Rat>> fs;
      for (const auto& s : a.factors) fs.push_back(parse_factor_spec(s));
      MPoly A = a.A.empty() ? MPoly() : parse_poly(a.A, Ring::xy());
      checks.emplace_back("integral", check_integral(ode, A, parse_poly(a.B, Ring::xy()), fs));
    }
    if (checks.empty()) throw UsageError("nothing to verify: give --v, --A/--factor or --report");
  }
  bool ok = true;
  for (const auto& [name, pass] : checks) {
    out["checks"][name] = pass;
    ok = ok && pass;
  }
  out["ok"] = ok;
  if (a.as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& [name, pass] : checks) std::cout << name << ": " << (pass ? "true" : "false") << "\n";
  }
  return ok ? kOk : kVerifyFalse;
}

// factor, parse

int cmd_factor(const std::string& text, bool as_json) {
  MPoly p = parse_poly(trim(text == "-" ? read_stream(std::cin) : text));
  if (p.is_zero()) throw UsageError("cannot factor the zero polynomial");
  auto f = factor_multivariate(p);
  if (as_json) {
    json fs = json::array();
    for (const auto& [q, m] : f.factors) fs.push_back({q.str(), m});
    std::cout << json{{"input", p.str()}, {"unit", f.unit.str()}, {"factors", fs}}.dump(2) << "\n";
    return kOk;
  }
  std::cout << "unit: " << f.unit.str() << "\n";
  for (const auto& [q, m] : f.factors) std::cout << "(" << q.str() << ")^" << m << "\n";
  return kOk;
}

int cmd_parse(const OdeInput& in, bool as_json) {
  auto ode = in.load();
  if (as_json) {
    std::cout << json{{"ode", ode_string(ode)}, {"order", ode.order}, {"M", ode.M.str()}, {"N", ode.N.str()}}.dump(2)
              << "\n";
  } else {
    std::cout << ode_string(ode) << "\nM = " << ode.M.str() << "\nN = " << ode.N.str() << "\n";
  }
  return kOk;
}

// bench

struct BenchArgs {
  std::vector<std::string> fixtures;
  int synthetic = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool as_json = false;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<std::string> names = a.fixtures;
  if (names.empty() && a.synthetic == 0)
    for (const auto& f : builtin_fixtures()) names.push_back(f.name);
  json out;
  out["fixtures"] = json::array();
  for (const auto& name : names) {
    auto f = find_fixture(name);
    if (!f) throw UsageError("unknown fixture " + name);
    SolveRequest req;
    req.ode = parse_ode(f->text, f->order);
    req.max_degree = f->max_degree;
    req.power = f->power;
    req.auto_denominator = f->auto_denominator;
    req.threads = a.threads;
    auto r = solve(req);
    json row = {{"fixture", name}, {"method", r.method}, {"found", r.found}};
    row["degree_found"] = r.found ? json(r.degree_found) : json(nullptr);
    if (!r.attempts.empty()) {
      row["unknowns"] = r.attempts.back().unknowns;
      row["equations"] = r.attempts.back().equations;
    }
    for (const auto& [phase, ms] : r.timings) row["timings_ms"][phase] = ms;
    out["fixtures"].push_back(row);
    if (!a.as_json) {
      std::cout << std::left << std::setw(6) << name << " " << std::setw(16) << r.method << " degree "
                << (r.found ? std::to_string(r.degree_found) : "-");
      if (!r.attempts.empty())
        std::cout << "  " << r.attempts.back().unknowns << " unknowns x " << r.attempts.back().equations
                  << " equations";
      std::cout << "\n       " << render_timings(r) << "\n";
    }
  }
  if (a.synthetic > 0) {
    std::mt19937_64 rng(a.seed);
    int cases = 0, general = 0, recovered = 0, divides = 0, identity = 0, found = 0, special_with_gcd = 0, missed = 0;
    detail::Stopwatch sw;
    while (cases < a.synthetic) {
      auto c = synthesize(random_darboux_integral(rng));
      if (!c) continue;
      ++cases;
      auto o = try_recover(*c);
      found += o.found;
      identity += o.found && o.identity_holds;
      if (c->general_position) {
        ++general;
        recovered += o.recovered;
        divides += o.divides;
      } else if (!o.recovered) {
        ++missed;
        special_with_gcd += !c->pols.coprime;
      }
    }
    const double ms = sw.lap();
    out["synthetic"] = {{"cases", cases},         {"general_position", general}, {"recovered", recovered}, {"divides_selected", divides},
                        {"found", found},         {"identity_holds", identity},  {"special_missed", missed},
                        {"special_with_gcd", special_with_gcd}, {"ms", ms}};
    if (!a.as_json)
      std::cout << "synthetic: " << cases << " cases, " << general << " in general position, " << recovered
                << " recovered (" << std::fixed << std::setprecision(1)
                << (general ? 100.0 * recovered / general : 0.0) << "%; " << divides
                << " divide the selected V), identity holds for " << identity << "/"
                << found << " found, " << ms << " ms\n";
  }
  if (a.as_json) std::cout << out.dump(2) << "\n";
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Linear Prelle-Singer solver for rational first- and second-order ODEs"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "find an inverse integrating factor or inverse Jacobi multiplier");
  sa.in.add(solve_cmd);
  sa.max_opt = solve_cmd->add_option("--max-degree", sa.max_degree, "largest candidate degree")->check(CLI::NonNegativeNumber);
  sa.power_opt = solve_cmd->add_option("--power", sa.power, "search V^k")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--power-sweep", sa.power_sweep, "try k = 1..KMAX")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--denominator", sa.denominator, "known denominator of V");
  sa.auto_opt = solve_cmd->add_flag("--auto-denominator", sa.auto_denominator,
                                    "retry with each degree-one Darboux polynomial as denominator");
  solve_cmd->add_flag("--json", sa.as_json, "JSON output");
  solve_cmd->add_flag("--verbose", sa.verbose, "print linear-system sizes and the full kernel basis");
  solve_cmd->add_option("--threads", sa.threads, "worker threads for the linear algebra")->check(CLI::PositiveNumber);

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "check a candidate V, first integral, or a solve report");
  va.in.add(verify_cmd, false);
  verify_cmd->add_option("--v", va.v, "candidate V (polynomial or rational)");
  verify_cmd->add_option("--power", va.power, "candidate is V^k")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--A", va.A, "numerator of the exponential part");
  verify_cmd->add_option("--B", va.B, "denominator of the exponential part");
  verify_cmd->add_option("--factor", va.factors, "factor of the first integral as <poly>:<exponent>");
  verify_cmd->add_option("--report", va.report_file, "JSON report from solve ('-' for stdin)");
  verify_cmd->add_flag("--json", va.as_json, "JSON output");

  std::string poly_text;
  bool factor_json = false;
  auto* factor_cmd = app.add_subcommand("factor", "factor a polynomial over Q");
  factor_cmd->add_option("poly", poly_text, "polynomial, '-' for stdin")->required();
  factor_cmd->add_flag("--json", factor_json, "JSON output");

  OdeInput pin;
  bool parse_json = false;
  auto* parse_cmd = app.add_subcommand("parse", "parse and normalize an ODE");
  pin.add(parse_cmd);
  parse_cmd->add_flag("--json", parse_json, "JSON output");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "time the bundled fixtures and synthetic recovery");
  bench_cmd->add_option("fixtures", ba.fixtures, "fixture names (default: all)");
  bench_cmd->add_option("--synthetic", ba.synthetic, "number of synthetic Darboux-integrable ODEs")
      ->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", ba.seed, "seed for the synthetic generator");
  bench_cmd->add_option("--threads", ba.threads, "worker threads for the linear algebra")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--json", ba.as_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa);
    if (*verify_cmd) return cmd_verify(va);
    if (*factor_cmd) return cmd_factor(poly_text, factor_json);
    if (*parse_cmd) return cmd_parse(pin, parse_json);
    if (*bench_cmd) return cmd_bench(ba);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DivisionByZero& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
