#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lps/field.hpp"
#include "lps/linalg.hpp"
#include "lps/mpoly.hpp"
#include "lps/parser.hpp"

namespace lps {

/// All monomials of total degree <= d in the given variables, by increasing
/// degree and, within a degree, with x-heavy monomials first: [1, x, y, x^2, ...].
inline std::vector<Monomial> candidate_monomials(Ring ring, int d) {
  if (d < 0) throw std::invalid_argument("candidate degree must be non-negative");
  std::vector<Var> vars;
  ring.for_each([&](Var v) { vars.push_back(v); });
  std::vector<Monomial> out;
  std::array<int, kMaxVars> e{};
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == vars.size()) {
      out.push_back(Monomial::from_exponents(e));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[var_index(vars[i])] = k;
      self(self, i + 1, left - k);
    }
    e[var_index(vars[i])] = 0;
  };
  rec(rec, 0, d);
  std::sort(out.begin(), out.end(), [](Monomial a, Monomial b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return b < a;
  });
  return out;
}

/// L(V) = sum_v C_v * dV/dv - C0 * V with polynomial coefficients.
struct LinearOperator {
  std::vector<std::pair<Var, MPoly>> first_order;
  MPoly zeroth;

  MPoly apply(const MPoly& p) const {
    MPoly r = -(zeroth * p);
    for (const auto& [v, c] : first_order) r += c * p.derivative(v);
    return r;
  }
};

/// Cleared identity for V = Vc / pbar with X(V) = k div V:
/// pbar (N Vc_x + M Vc_y - k div Vc) - Vc X(pbar) = 0.
inline LinearOperator lps_operator(const VectorField& field, int k, const MPoly& denominator) {
  if (field.order() != 1) throw std::invalid_argument("LPS assembly needs a first-order field");
  if (k < 1) throw std::invalid_argument("power k must be positive");
  if (denominator.is_zero()) throw DivisionByZero();
  const MPoly& pb = denominator;
  LinearOperator op;
  op.first_order = {{Var::x, pb * field.N()}, {Var::y, pb * field.M()}};
  op.zeroth = MPoly(Rat(k)) * pb * field.polynomial_divergence() + field.apply_cleared(pb);
  return op;
}

/// N^2 P_x + z N^2 P_y + N M P_z - (M_z N - M N_z) P = 0.
inline LinearOperator lps2_operator(const VectorField& field) {
  if (field.order() != 2) throw std::invalid_argument("LPS2 assembly needs a second-order field");
  const MPoly& M = field.M();
  const MPoly& N = field.N();
  const MPoly N2 = N * N;
  LinearOperator op;
  op.first_order = {{Var::x, N2}, {Var::y, MPoly::var(Var::z) * N2}, {Var::z, N * M}};
  op.zeroth = M.derivative(Var::z) * N - M * N.derivative(Var::z);
  return op;
}

/// Coefficient matrix of L applied to the generic candidate over `columns`.
/// Rows are the monomials of the collected identity, in decreasing order.
inline RatMatrix assemble_system(const LinearOperator& op, const std::vector<Monomial>& columns,
                                 std::vector<Monomial>* row_monomials = nullptr) {
  std::map<Monomial, std::vector<RatMatrix::Entry>, std::greater<>> rows;
  std::unordered_map<Monomial, Rat> acc;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Monomial m = columns[j];
    acc.clear();
    for (const auto& [v, c] : op.first_order) {
      const int e = m.exponent(v);
      if (e == 0) continue;
      auto ex = m.exponents();
      --ex[var_index(v)];
      const Monomial q = Monomial::from_exponents(ex);
      const Rat scale(e);
      for (const auto& t : c.terms()) acc[t.mono * q] += t.coeff * scale;
    }
    for (const auto& t : op.zeroth.terms()) acc[t.mono * m] -= t.coeff;
    for (auto& [mono, val] : acc)
      if (!val.is_zero()) rows[mono].emplace_back(static_cast<int>(j), std::move(val));
  }
  RatMatrix mat(0, static_cast<int>(columns.size()));
  if (row_monomials) row_monomials->clear();
  for (auto& [mono, entries] : rows) {
    if (row_monomials) row_monomials->push_back(mono);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    mat.add_row(std::move(entries));
  }
  return mat;
}

inline RatMatrix assemble_lps_system(const VectorField& field, int d, int k = 1,
                                     const MPoly& denominator = MPoly(Rat(1))) {
  return assemble_system(lps_operator(field, k, denominator), candidate_monomials(field.ring(), d));
}

inline RatMatrix assemble_lps2_system(const VectorField& field, int d) {
  return assemble_system(lps2_operator(field), candidate_monomials(field.ring(), d));
}

inline MPoly polynomial_from_vector(const std::vector<Monomial>& columns, const RatVector& v, Ring ring) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (!v[j].is_zero()) terms.push_back({columns[j], v[j]});
  return MPoly::from_terms(std::move(terms), ring);
}

/// Minimal total degree, then fewest terms, then smallest leading monomial.
inline std::size_t select_kernel_element(const std::vector<MPoly>& basis) {
  if (basis.empty()) throw std::invalid_argument("empty kernel basis");
  auto key = [](const MPoly& p) { return std::make_tuple(p.degree(), p.size(), p.terms().front().mono); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < basis.size(); ++i)
    if (key(basis[i]) < key(basis[best])) best = i;
  return best;
}

struct DegreeAttempt {
  int degree = 0;
  int unknowns = 0;
  int equations = 0;
  int rank = 0;
  int nullity = 0;
  bool used_modular = false;
  int primes = 0;
  double assemble_ms = 0;
  double solve_ms = 0;
};

struct SearchOptions {
  int max_degree = 20;
  int k = 1;
  MPoly denominator{Rat(1)};
  NullspaceOptions linalg{};
};

enum class IifKind { polynomial, rational, kth_root };

inline const char* kind_name(IifKind k) {
  switch (k) {
    case IifKind::polynomial: return "polynomial";
    case IifKind::rational: return "rational";
    case IifKind::kth_root: return "kth_root";
  }
  return "?";
}

/// V = (V_num / V_den)^(1/k).
struct InverseIntegratingFactor {
  IifKind kind = IifKind::polynomial;
  MPoly V_num;
  MPoly V_den{Rat(1)};
  int k = 1;
  int degree_found = 0;
  int nullspace_dim = 0;
  std::vector<MPoly> basis;  // numerators of all kernel basis elements
};

struct JacobiMultiplier {
  MPoly P_J;
  int degree_found = 0;
  int nullspace_dim = 0;
  std::vector<MPoly> basis;
};

template <class T>
struct SearchResult {
  std::optional<T> value;
  std::vector<DegreeAttempt> attempts;
  double total_ms = 0;

  explicit operator bool() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

namespace detail {

struct KernelHit {
  std::vector<MPoly> basis;
  std::size_t selected = 0;
  int degree = 0;
};

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Degrees 1..max_degree (only 0 when max_degree is 0); stops at the first
/// nontrivial kernel.
inline std::optional<KernelHit> iterate_degrees(const LinearOperator& op, Ring ring, int max_degree,
                                                const NullspaceOptions& linalg,
                                                std::vector<DegreeAttempt>& attempts) {
  if (max_degree < 0) throw std::invalid_argument("max_degree must be non-negative");
  const int first = max_degree == 0 ? 0 : 1;
  for (int d = first; d <= max_degree; ++d) {
    DegreeAttempt a;
    a.degree = d;
    auto t0 = std::chrono::steady_clock::now();
    auto cols = candidate_monomials(ring, d);
    RatMatrix m = assemble_system(op, cols);
    a.assemble_ms = ms_since(t0);
    a.unknowns = m.cols();
    a.equations = m.rows();
    t0 = std::chrono::steady_clock::now();
    NullspaceStats st;
    auto kernel = nullspace(m, linalg, &st);
    a.solve_ms = ms_since(t0);
    a.rank = st.rank;
    a.nullity = static_cast<int>(kernel.size());
    a.used_modular = st.used_modular;
    a.primes = st.primes;
    attempts.push_back(a);
    if (kernel.empty()) continue;
    KernelHit hit;
    hit.degree = d;
    for (const auto& v : kernel) hit.basis.push_back(polynomial_from_vector(cols, v, ring).normalized());
    hit.selected = select_kernel_element(hit.basis);
    return hit;
  }
  return std::nullopt;
}

}  // namespace detail

/// Searches V = Vc / denominator with Vc polynomial, X(V) = k div V.
inline SearchResult<InverseIntegratingFactor> lps_search(const RationalODE& ode, const SearchOptions& opts = {}) {
  if (ode.order != 1) throw std::invalid_argument("lps_search needs a first-order ODE");
  SearchResult<InverseIntegratingFactor> res;
  auto t0 = std::chrono::steady_clock::now();
  VectorField f = build_field(ode);
  MPoly den = opts.denominator.normalized().with_ring(Ring::xy());
  auto op = lps_operator(f, opts.k, den);
  auto hit = detail::iterate_degrees(op, Ring::xy(), opts.max_degree, opts.linalg, res.attempts);
  if (hit) {
    InverseIntegratingFactor v;
    v.k = opts.k;
    v.V_num = hit->basis[hit->selected];
    v.V_den = den;
    v.degree_found = v.V_num.degree();
    if (!den.is_constant()) {
      RatFunc q(v.V_num, den);
      v.V_num = q.num().normalized();
      v.V_den = q.den();
    }
    v.kind = opts.k > 1 ? IifKind::kth_root : (v.V_den.is_constant() ? IifKind::polynomial : IifKind::rational);
    v.nullspace_dim = static_cast<int>(hit->basis.size());
    v.basis = std::move(hit->basis);
    res.value = std::move(v);
  }
  res.total_ms = detail::ms_since(t0);
  return res;
}

inline SearchResult<JacobiMultiplier> lps2_search(const RationalODE& ode, int max_degree = 20,
                                                  const NullspaceOptions& linalg = {}) {
  if (ode.order != 2) throw std::invalid_argument("lps2_search needs a second-order ODE");
  SearchResult<JacobiMultiplier> res;
  auto t0 = std::chrono::steady_clock::now();
  VectorField f = build_field(ode);
  auto hit = detail::iterate_degrees(lps2_operator(f), Ring::xyz(), max_degree, linalg, res.attempts);
  if (hit) {
    JacobiMultiplier j;
    j.P_J = hit->basis[hit->selected];
    j.degree_found = j.P_J.degree();
    j.nullspace_dim = static_cast<int>(hit->basis.size());
    j.basis = std::move(hit->basis);
    res.value = std::move(j);
  }
  res.total_ms = detail::ms_since(t0);
  return res;
}

}  // namespace lps
