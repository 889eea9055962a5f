#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lps/factor.hpp"
#include "lps/field.hpp"
#include "lps/gcd.hpp"
#include "lps/linalg.hpp"
#include "lps/lps.hpp"

namespace lps {

/// I = exp(A/B) * prod(p_j^n_j).
struct DarbouxFirstIntegral {
  MPoly A;
  MPoly B{Rat(1)};
  std::vector<std::pair<MPoly, Rat>> factors;
};

struct CofactorRelation {
  std::vector<MPoly> cofactors;
  MPoly target;
  AffineSolutionSet solutions;
};

/// Exponents n with sum n_i q_i = target; nullopt when inconsistent.
inline std::optional<CofactorRelation> solve_cofactor_relation(const std::vector<MPoly>& cofactors,
                                                               const MPoly& target) {
  std::map<Monomial, int, std::greater<>> row_of;
  for (const auto& q : cofactors)
    for (const auto& t : q.terms()) row_of.emplace(t.mono, 0);
  for (const auto& t : target.terms()) row_of.emplace(t.mono, 0);
  int r = 0;
  for (auto& [m, idx] : row_of) idx = r++;
  std::vector<std::vector<RatMatrix::Entry>> rows(row_of.size());
  for (std::size_t i = 0; i < cofactors.size(); ++i)
    for (const auto& t : cofactors[i].terms()) rows[row_of[t.mono]].emplace_back(static_cast<int>(i), t.coeff);
  RatMatrix m(0, static_cast<int>(cofactors.size()));
  for (auto& row : rows) m.add_row(std::move(row));
  RatVector rhs(row_of.size(), Rat(0));
  for (const auto& t : target.terms()) rhs[row_of[t.mono]] = t.coeff;
  auto sol = solve_affine(m, rhs);
  if (!sol) return std::nullopt;
  for (const auto* v : {&*sol->particular}) {
    MPoly acc;
    for (std::size_t i = 0; i < cofactors.size(); ++i) acc += cofactors[i] * (*v)[i];
    if (acc != target) throw InternalError("cofactor relation residual nonzero");
  }
  return CofactorRelation{cofactors, target, std::move(*sol)};
}

/// X(A/B) + sum n_j X(p_j)/p_j, computed from the ODE with rational functions.
inline RatFunc first_integral_residual(const VectorField& field, const DarbouxFirstIntegral& I) {
  if (I.B.is_zero()) throw DivisionByZero();
  RatFunc acc = field.apply(RatFunc(I.A, I.B));
  for (const auto& [p, n] : I.factors) acc = acc + RatFunc(MPoly(n)) * field.apply(RatFunc(p)) / RatFunc(p);
  return acc;
}

inline bool is_constant_integral(const DarbouxFirstIntegral& I) {
  bool any = false;
  for (const auto& [p, n] : I.factors)
    if (!n.is_zero() && !p.is_constant()) any = true;
  return !any && RatFunc(I.A, I.B).num().is_constant() && RatFunc(I.A, I.B).den().is_constant();
}

/// Exact: X(I) = 0 for the nonconstant integral I.
inline bool verify_first_integral(const VectorField& field, const DarbouxFirstIntegral& I) {
  if (is_constant_integral(I)) return false;
  return first_integral_residual(field, I).is_zero();
}

struct PolPair {
  MPoly pol_x, pol_y;
  bool coprime = false;
};

/// Pol pair of I^L, L the common denominator of the exponents:
/// I_x / I = Pol_x / (B^2 prod p_j), likewise for y.
inline PolPair compute_pol_pair(const DarbouxFirstIntegral& I) {
  Int L = 1;
  for (const auto& [p, n] : I.factors) L = lcm(L, n.den());
  const Rat scale(L);
  const MPoly A = I.A * scale;
  const MPoly& B = I.B;
  std::vector<MPoly> ps;
  std::vector<Rat> ns;
  for (const auto& [p, n] : I.factors) {
    if (n.is_zero()) continue;
    ps.push_back(p);
    ns.push_back(n * scale);
  }
  MPoly prod(Rat(1));
  for (const auto& p : ps) prod *= p;
  PolPair out;
  for (Var v : {Var::x, Var::y}) {
    MPoly pol = (A.derivative(v) * B - B.derivative(v) * A) * prod;
    MPoly sum;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      MPoly others(Rat(1));
      for (std::size_t l = 0; l < ps.size(); ++l)
        if (l != k) others *= ps[l];
      sum += ps[k].derivative(v) * others * ns[k];
    }
    pol += B * B * sum;
    (v == Var::x ? out.pol_x : out.pol_y) = pol.with_ring(Ring::xy());
  }
  if (out.pol_x.is_zero() || out.pol_y.is_zero()) {
    out.coprime = (out.pol_x.is_zero() ? out.pol_y : out.pol_x).is_constant();
  } else {
    out.coprime = gcd(out.pol_x, out.pol_y).is_constant();
  }
  return out;
}

struct Reconstruction {
  std::optional<DarbouxFirstIntegral> integral;
  std::vector<DarbouxFactor> darboux;  // irreducible factors of V with cofactors
  MPoly B{Rat(1)};
  int d_A = 0;
  std::string failure;  // set when integral is empty
};

namespace detail {

/// Kernel of X(A) B - A X(B) + B^2 sum n_j q_j = 0 over A (deg <= dA, without
/// the coefficient of LM(B)) and n.
inline std::optional<DarbouxFirstIntegral> solve_integral_ansatz(const VectorField& field, const MPoly& B,
                                                                 const std::vector<DarbouxFactor>& fs, int dA) {
  std::vector<Monomial> amons;
  const Monomial lmB = B.terms().front().mono;
  for (Monomial m : candidate_monomials(Ring::xy(), dA))
    if (m != lmB) amons.push_back(m);
  const MPoly XB = field.apply_cleared(B);
  const MPoly B2 = B * B;
  std::vector<MPoly> images;
  for (Monomial m : amons) {
    MPoly a = MPoly::monomial(m, Rat(1));
    images.push_back(field.apply_cleared(a) * B - a * XB);
  }
  for (const auto& f : fs) images.push_back(B2 * f.q);
  std::map<Monomial, std::vector<RatMatrix::Entry>, std::greater<>> rows;
  for (std::size_t j = 0; j < images.size(); ++j)
    for (const auto& t : images[j].terms()) rows[t.mono].emplace_back(static_cast<int>(j), t.coeff);
  RatMatrix m(0, static_cast<int>(images.size()));
  for (auto& [mono, entries] : rows) m.add_row(std::move(entries));
  auto kernel = nullspace(m);
  if (kernel.empty()) return std::nullopt;
  // fewest nonzero exponents, then fewest A terms; kernel vectors are
  // integer-primitive, so the exponents are integers
  auto key = [&](const RatVector& v) {
    int nz = 0, aterms = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!v[j].is_zero()) ++(j < amons.size() ? aterms : nz);
    return std::make_pair(nz, aterms);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < kernel.size(); ++i)
    if (key(kernel[i]) < key(kernel[best])) best = i;
  const RatVector& v = kernel[best];
  DarbouxFirstIntegral I;
  std::vector<Term> terms;
  for (std::size_t j = 0; j < amons.size(); ++j)
    if (!v[j].is_zero()) terms.push_back({amons[j], v[j]});
  I.A = MPoly::from_terms(std::move(terms), Ring::xy());
  I.B = B;
  for (std::size_t j = 0; j < fs.size(); ++j)
    if (!v[amons.size() + j].is_zero()) I.factors.emplace_back(fs[j].p, v[amons.size() + j]);
  if (I.A.is_zero()) {
    I.B = MPoly(Rat(1), Ring::xy());
  } else {
    RatFunc q(I.A, I.B);
    I.A = q.num();
    I.B = q.den();
  }
  return I;
}

}  // namespace detail

/// Reconstructs I = exp(A/B) prod p_j^n_j from a verified inverse integrating
/// factor. B collects half of every repeated factor of the numerator; every
/// irreducible factor of numerator and denominator enters the exponent ansatz.
inline Reconstruction reconstruct_first_integral(const VectorField& field, const InverseIntegratingFactor& V) {
  if (field.order() != 1) throw std::invalid_argument("reconstruction needs a first-order field");
  Reconstruction out;
  if (V.k != 1) {
    out.failure = "k-th root inverse integrating factor";
    return out;
  }
  MPoly B(Rat(1));
  std::vector<std::pair<MPoly, int>> all;
  if (!V.V_num.is_constant()) {
    for (const auto& part : squarefree_decompose(V.V_num).parts) B *= part.factor.pow(part.multiplicity / 2);
    for (const auto& f : factor_multivariate(V.V_num).factors) all.push_back(f);
  }
  if (!V.V_den.is_constant())
    for (const auto& f : factor_multivariate(V.V_den).factors) all.push_back(f);
  B = B.normalized().with_ring(Ring::xy());
  out.B = B;
  for (const auto& [p, m] : all) {
    auto d = darboux_check(field, p);
    if (!d) {
      out.failure = "factor " + p.str() + " is not a Darboux polynomial";
      return out;
    }
    d->multiplicity = m;
    out.darboux.push_back(*d);
  }
  const int step = std::max({1, field.M().degree(), field.N().degree()});
  out.d_A = B.degree() + step;
  for (int attempt = 0; attempt < 2; ++attempt, out.d_A += step) {
    auto I = detail::solve_integral_ansatz(field, B, out.darboux, out.d_A);
    if (!I) continue;
    if (!verify_first_integral(field, *I)) throw InternalError("reconstructed first integral fails X(I) = 0");
    out.integral = std::move(I);
    return out;
  }
  out.d_A -= step;
  out.failure = "only the trivial solution up to deg A = " + std::to_string(out.d_A);
  return out;
}

struct Lps2Factor {
  DarbouxFactor factor;
  bool verified = false;
};

/// Irreducible factors of P_J with cofactors for the cleared second-order field.
inline std::vector<Lps2Factor> lps2_postprocess(const VectorField& field, const JacobiMultiplier& P) {
  if (field.order() != 2) throw std::invalid_argument("post-processing needs a second-order field");
  std::vector<Lps2Factor> out;
  if (P.P_J.is_constant()) return out;
  for (const auto& [p, m] : factor_multivariate(P.P_J).factors) {
    Lps2Factor f;
    if (auto d = darboux_check(field, p)) {
      f.factor = *d;
      f.verified = true;
    } else {
      f.factor.p = p;
    }
    f.factor.multiplicity = m;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace lps
