#pragma once

#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lps/darboux.hpp"
#include "lps/factor.hpp"
#include "lps/lps.hpp"
#include "lps/parser.hpp"
#include "lps/verify.hpp"

namespace lps {

inline std::string render(const MPoly& p) { return p.str(); }

inline std::string ode_string(const RationalODE& ode) {
  std::string head = ode.order == 1 ? "y' = " : "y'' = ";
  if (ode.N == MPoly(Rat(1))) return head + ode.M.str();
  return head + "(" + ode.M.str() + ")/(" + ode.N.str() + ")";
}

/// Order from the head of an echoed ODE string.
inline int ode_order_from_text(std::string_view text) {
  auto pos = text.find_first_not_of(" \t");
  if (pos != std::string_view::npos && (text.substr(pos, 3) == "y''" || text.substr(pos, 2) == "z'")) return 2;
  return 1;
}

struct SolveRequest {
  RationalODE ode;
  int max_degree = 20;
  int power = 1;
  int power_sweep = 0;  // > 0: try k = 1..power_sweep
  std::optional<MPoly> denominator;
  bool auto_denominator = false;
  unsigned threads = 1;
};

struct SolveReport {
  RationalODE ode;
  std::string method;
  bool found = false;
  int degree_found = -1;
  IifKind kind = IifKind::polynomial;
  int k = 1;
  MPoly v_num, v_den{Rat(1)};  // V = (v_num / v_den)^(1/k), or P_J for order 2
  Rat unit{1};
  std::vector<std::pair<MPoly, int>> factored;  // denominator factors carry negative multiplicity
  std::vector<DarbouxFactor> darboux;
  std::vector<bool> darboux_verified;
  std::optional<DarbouxFirstIntegral> first_integral;
  std::string integral_note;
  std::optional<bool> pde, closedness, integral;
  std::vector<MPoly> dp_lines;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<DegreeAttempt> attempts;
  std::vector<MPoly> basis;
};

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - t0).count();
    t0 = now;
    return ms;
  }
};

inline void add_factors(SolveReport& r, const MPoly& p, int sign) {
  if (p.is_constant()) {
    if (sign > 0) r.unit *= p.constant_value();
    else r.unit /= p.constant_value();
    return;
  }
  auto f = factor_multivariate(p);
  if (sign > 0) r.unit *= f.unit;
  else r.unit /= f.unit;
  for (const auto& [q, m] : f.factors) r.factored.emplace_back(q, sign * m);
}

template <class T>
void record_search(SolveReport& r, const SearchResult<T>& s, double& assemble, double& solve) {
  for (const auto& a : s.attempts) {
    assemble += a.assemble_ms;
    solve += a.solve_ms;
  }
  r.attempts = s.attempts;
}

inline void solve_first_order(const SolveRequest& req, SolveReport& r) {
  Stopwatch sw;
  double assemble = 0, solve = 0;
  std::vector<int> ks;
  if (req.power_sweep > 0)
    for (int k = 1; k <= req.power_sweep; ++k) ks.push_back(k);
  else
    ks.push_back(req.power);
  auto attempt = [&](const MPoly& den) -> std::optional<InverseIntegratingFactor> {
    for (int k : ks) {
      SearchOptions o;
      o.max_degree = req.max_degree;
      o.k = k;
      o.denominator = den;
      o.linalg.threads = req.threads;
      auto s = lps_search(req.ode, o);
      record_search(r, s, assemble, solve);
      if (s) return *s;
    }
    return std::nullopt;
  };
  const MPoly one(Rat(1), Ring::xy());
  const MPoly base_den = req.denominator ? *req.denominator : one;
  auto V = attempt(base_den);
  bool via_denominator = req.denominator && !req.denominator->is_constant();
  const double search_ms = sw.lap();
  if (!V && req.auto_denominator) {
    auto dp = degree1_dp_search(build_field(req.ode));
    r.dp_lines = dp.lines;
    for (const auto& f : dp.families)
      if (std::find(r.dp_lines.begin(), r.dp_lines.end(), f) == r.dp_lines.end()) r.dp_lines.push_back(f);
    r.timings.emplace_back("dp_search", sw.lap());
    for (const auto& line : r.dp_lines) {
      if ((V = attempt(line * base_den))) {
        via_denominator = true;
        break;
      }
    }
  }
  r.timings.emplace_back("assemble", assemble);
  r.timings.emplace_back("solve", solve);
  r.timings.emplace_back("search", search_ms + sw.lap());
  if (!V) {
    r.method = req.auto_denominator || via_denominator ? "lps-denominator" : (ks.back() > 1 ? "lps-power" : "lps");
    return;
  }
  r.method = via_denominator ? "lps-denominator" : (V->k > 1 ? "lps-power" : "lps");
  r.found = true;
  r.degree_found = V->degree_found;
  r.kind = V->kind;
  r.k = V->k;
  r.v_num = V->V_num;
  r.v_den = V->V_den;
  r.basis = V->basis;
  add_factors(r, r.v_num, 1);
  add_factors(r, r.v_den, -1);
  r.timings.emplace_back("factor", sw.lap());
  const VectorField field = build_field(req.ode);
  if (V->k == 1) {
    auto rec = reconstruct_first_integral(field, *V);
    r.darboux = rec.darboux;
    r.first_integral = rec.integral;
    r.integral_note = rec.failure;
  } else {
    for (const auto& [p, m] : r.factored)
      if (auto d = darboux_check(field, p)) {
        d->multiplicity = m;
        r.darboux.push_back(*d);
      }
    r.integral_note = "k-th root inverse integrating factor";
  }
  r.darboux_verified.assign(r.darboux.size(), true);
  r.timings.emplace_back("reconstruct", sw.lap());
  r.pde = check_inverse_integrating_factor(req.ode, r.v_num, r.v_den, r.k);
  r.closedness = check_closedness(req.ode, r.v_num, r.v_den, r.k);
  if (r.first_integral) r.integral = verify_first_integral(field, *r.first_integral);
  r.timings.emplace_back("verify", sw.lap());
}

inline void solve_second_order(const SolveRequest& req, SolveReport& r) {
  Stopwatch sw;
  double assemble = 0, solve = 0;
  r.method = "lps2";
  NullspaceOptions lin;
  lin.threads = req.threads;
  auto s = lps2_search(req.ode, req.max_degree, lin);
  record_search(r, s, assemble, solve);
  r.timings.emplace_back("assemble", assemble);
  r.timings.emplace_back("solve", solve);
  r.timings.emplace_back("search", sw.lap());
  if (!s) return;
  r.found = true;
  r.degree_found = s->degree_found;
  r.v_num = s->P_J;
  r.v_den = MPoly(Rat(1), Ring::xyz());
  r.basis = s->basis;
  const VectorField field = build_field(req.ode);
  for (const auto& f : lps2_postprocess(field, *s)) {
    r.factored.emplace_back(f.factor.p, f.factor.multiplicity);
    r.darboux.push_back(f.factor);
    r.darboux_verified.push_back(f.verified);
  }
  if (!r.v_num.is_constant()) r.unit = factor_multivariate(r.v_num).unit;
  else r.unit = r.v_num.constant_value();
  r.timings.emplace_back("factor", sw.lap());
  r.pde = check_jacobi_multiplier(req.ode, r.v_num);
  r.timings.emplace_back("verify", sw.lap());
}

}  // namespace detail

/// parse -> field -> search -> factor -> reconstruct -> verify.
inline SolveReport solve(const SolveRequest& req) {
  if (req.max_degree < 0) throw std::invalid_argument("max degree must be non-negative");
  if (req.power < 1 || req.power_sweep < 0) throw std::invalid_argument("power must be positive");
  if (req.ode.order == 2 && (req.power != 1 || req.power_sweep > 0 || req.denominator || req.auto_denominator))
    throw std::invalid_argument("power and denominator options apply to first-order ODEs only");
  if (req.denominator && req.denominator->is_zero()) throw std::invalid_argument("denominator must be nonzero");
  SolveReport r;
  r.ode = req.ode;
  detail::Stopwatch total;
  if (req.ode.order == 1) detail::solve_first_order(req, r);
  else detail::solve_second_order(req, r);
  r.timings.emplace_back("total", total.lap());
  return r;
}

/// True when every computed verification flag holds.
inline bool all_verified(const SolveReport& r) {
  for (const auto& f : {r.pde, r.closedness, r.integral})
    if (f && !*f) return false;
  for (bool v : r.darboux_verified)
    if (!v) return false;
  return true;
}

inline nlohmann::json to_json(const SolveReport& r, bool verbose = false) {
  using nlohmann::json;
  auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  json j;
  j["ode"] = ode_string(r.ode);
  j["method"] = r.method;
  j["degree_found"] = r.found ? json(r.degree_found) : json(nullptr);
  if (r.found) {
    json fac = json::array();
    if (r.unit != Rat(1)) fac.push_back({r.unit.str(), 1});
    for (const auto& [p, m] : r.factored) fac.push_back({p.str(), m});
    j["v"] = {{"factored", fac}, {"kind", r.ode.order == 1 ? kind_name(r.kind) : "jacobi_multiplier"},
              {"k", r.k}, {"num", r.v_num.str()}, {"den", r.v_den.str()}};
  } else {
    j["v"] = nullptr;
  }
  j["darboux"] = json::array();
  for (const auto& d : r.darboux) j["darboux"].push_back({{"p", d.p.str()}, {"q", d.q.str()}, {"mult", d.multiplicity}});
  if (r.first_integral) {
    json fs = json::array();
    for (const auto& [p, n] : r.first_integral->factors) fs.push_back({p.str(), n.str()});
    j["first_integral"] = {{"A", r.first_integral->A.str()}, {"B", r.first_integral->B.str()}, {"factors", fs}};
  } else {
    j["first_integral"] = nullptr;
  }
  j["verified"] = {{"pde", opt(r.pde)}, {"closedness", opt(r.closedness)}, {"integral", opt(r.integral)}};
  j["timings_ms"] = json::object();
  for (const auto& [phase, ms] : r.timings) j["timings_ms"][phase] = ms;
  if (verbose) {
    json d;
    d["attempts"] = json::array();
    for (const auto& a : r.attempts)
      d["attempts"].push_back({{"degree", a.degree}, {"unknowns", a.unknowns}, {"equations", a.equations},
                               {"rank", a.rank}, {"nullity", a.nullity}, {"modular", a.used_modular},
                               {"primes", a.primes}});
    d["basis"] = json::array();
    for (const auto& b : r.basis) d["basis"].push_back(b.str());
    d["dp_lines"] = json::array();
    for (const auto& l : r.dp_lines) d["dp_lines"].push_back(l.str());
    if (!r.integral_note.empty()) d["integral_note"] = r.integral_note;
    j["diagnostics"] = d;
  }
  return j;
}

inline std::string factored_string(const SolveReport& r) {
  std::string num, den;
  auto wrap = [](const MPoly& p, int m) {
    std::string s = p.size() > 1 ? "(" + p.str() + ")" : p.str();
    return m == 1 ? s : s + "^" + std::to_string(m);
  };
  for (const auto& [p, m] : r.factored) {
    std::string& side = m > 0 ? num : den;
    if (!side.empty()) side += " * ";
    side += wrap(p, m > 0 ? m : -m);
  }
  if (r.unit != Rat(1)) num = num.empty() ? r.unit.str() : r.unit.str() + " * " + num;
  if (num.empty()) num = "1";
  return den.empty() ? num : num + " / (" + den + ")";
}

inline std::string render_text(const SolveReport& r, bool verbose = false) {
  std::ostringstream os;
  auto flag = [](const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : "n/a"; };
  os << "ode: " << ode_string(r.ode) << "\n";
  os << "method: " << r.method << "\n";
  if (verbose) {
    os << "attempts:\n";
    for (const auto& a : r.attempts)
      os << "  degree " << a.degree << ": " << a.unknowns << " unknowns, " << a.equations << " equations, rank "
         << a.rank << ", nullity " << a.nullity << (a.used_modular ? ", modular" : ", exact") << "\n";
    if (!r.dp_lines.empty()) {
      os << "degree-one Darboux polynomials:";
      for (const auto& l : r.dp_lines) os << " " << l.str();
      os << "\n";
    }
  }
  if (!r.found) {
    os << "result: not found up to the requested degree\n";
    return os.str();
  }
  os << "degree_found: " << r.degree_found << "\n";
  if (r.ode.order == 1) {
    os << "V kind: " << kind_name(r.kind) << ", k = " << r.k << "\n";
    os << (r.k > 1 ? "V^k = " : "V = ");
    if (r.v_den.is_constant()) os << r.v_num.str();
    else os << "(" << r.v_num.str() << ") / (" << r.v_den.str() << ")";
    os << "\n";
  } else {
    os << "P_J = " << r.v_num.str() << "\n";
  }
  os << "factored: " << factored_string(r) << "\n";
  if (verbose) {
    os << "nullspace basis (" << r.basis.size() << "):\n";
    for (const auto& b : r.basis) os << "  " << b.str() << "\n";
  }
  os << "darboux polynomials:\n";
  for (std::size_t i = 0; i < r.darboux.size(); ++i) {
    const auto& d = r.darboux[i];
    os << "  p = " << d.p.str() << "  mult " << d.multiplicity;
    if (r.darboux_verified[i]) os << "  cofactor " << d.q.str();
    else os << "  (not a Darboux polynomial)";
    os << "\n";
  }
  if (r.first_integral) {
    const auto& I = *r.first_integral;
    os << "first integral: ";
    bool any = false;
    if (!I.A.is_zero()) {
      os << "exp((" << I.A.str() << ")/(" << I.B.str() << "))";
      any = true;
    }
    for (const auto& [p, n] : I.factors) {
      os << (any ? " * " : "") << "(" << p.str() << ")^(" << n.str() << ")";
      any = true;
    }
    os << "\n";
  } else if (r.ode.order == 1) {
    os << "first integral: none (" << r.integral_note << ")\n";
  }
  os << "verified: pde=" << flag(r.pde) << " closedness=" << flag(r.closedness) << " integral=" << flag(r.integral)
     << "\n";
  return os.str();
}

inline std::string render_timings(const SolveReport& r) {
  std::ostringstream os;
  os << "timings_ms:";
  for (const auto& [phase, ms] : r.timings) os << " " << phase << "=" << ms;
  return os.str();
}

}  // namespace lps
