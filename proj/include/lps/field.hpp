#pragma once

#include <utility>
#include <vector>

#include "lps/mpoly.hpp"
#include "lps/parser.hpp"
#include "lps/ratfunc.hpp"

namespace lps {

/// Vector field associated with a rational ODE.
///
/// Order 1: X = N d/dx + M d/dy, divergence N_x + M_y.
/// Order 2: the Cartan field X = d/dx + z d/dy + (M/N) d/dz with divergence
/// (M_z N - M N_z) / N^2. Its polynomial multiple N*X ("cleared" field) is
/// what Darboux polynomials are checked against.
class VectorField {
public:
  VectorField() = default;

  static VectorField from_ode(const RationalODE& ode) {
    VectorField f;
    f.order_ = ode.order;
    f.M_ = ode.M;
    f.N_ = ode.N;
    const Ring r = ode.ring();
    if (ode.order == 1) {
      f.components_ = {{Var::x, RatFunc(ode.N.with_ring(r))}, {Var::y, RatFunc(ode.M.with_ring(r))}};
      f.divergence_ = RatFunc((ode.N.derivative(Var::x) + ode.M.derivative(Var::y)).with_ring(r));
    } else {
      f.components_ = {{Var::x, RatFunc(MPoly(Rat(1), r))},
                       {Var::y, RatFunc(MPoly::var(Var::z, r))},
                       {Var::z, RatFunc(ode.M, ode.N)}};
      f.divergence_ = RatFunc(ode.M.derivative(Var::z) * ode.N - ode.M * ode.N.derivative(Var::z),
                              ode.N * ode.N);
    }
    return f;
  }

  int order() const { return order_; }
  const MPoly& M() const { return M_; }
  const MPoly& N() const { return N_; }
  Ring ring() const { return order_ == 1 ? Ring::xy() : Ring::xyz(); }
  const std::vector<std::pair<Var, RatFunc>>& components() const { return components_; }
  const RatFunc& divergence() const { return divergence_; }

  /// Order-1 divergence as a polynomial.
  MPoly polynomial_divergence() const { return divergence_.num() * divergence_.den().leading_coeff().inverse(); }

  /// Polynomial derivation used for Darboux checks: X itself for order 1,
  /// N*X = N d/dx + zN d/dy + M d/dz for order 2.
  MPoly apply_cleared(const MPoly& p) const {
    if (order_ == 1) return N_ * p.derivative(Var::x) + M_ * p.derivative(Var::y);
    return N_ * p.derivative(Var::x) + MPoly::var(Var::z) * N_ * p.derivative(Var::y) +
           M_ * p.derivative(Var::z);
  }

  /// X applied to a rational function.
  RatFunc apply(const RatFunc& f) const {
    RatFunc acc;
    for (const auto& [v, c] : components_) acc = acc + c * f.derivative(v);
    return acc;
  }

private:
  int order_ = 1;
  MPoly M_, N_{Rat(1)};
  std::vector<std::pair<Var, RatFunc>> components_;
  RatFunc divergence_;
};

inline VectorField build_field(const RationalODE& ode) { return VectorField::from_ode(ode); }

/// X~ = X - aux * div(X) d/d(aux), acting on candidates aux^k * V with aux
/// = z (order 1) or w (order 2). X~(aux^k V) = aux^k (X(V) - k div V).
struct ExtendedField {
  VectorField base;
  Var aux = Var::z;
  int power = 1;

  static ExtendedField of(const VectorField& f, int k = 1) {
    if (k <= 0) throw std::invalid_argument("power must be positive");
    return {f, f.order() == 1 ? Var::z : Var::w, k};
  }

  /// X~(aux^k * V) as a rational function in (base variables, aux).
  RatFunc apply_to_candidate(const MPoly& v) const {
    MPoly auxk = MPoly::var(aux).pow(power);
    RatFunc cand(auxk * v);
    RatFunc result;
    for (const auto& [var, c] : base.components()) result = result + c * cand.derivative(var);
    RatFunc aux_component = RatFunc(MPoly::var(aux)) * base.divergence();
    return result - aux_component * cand.derivative(aux);
  }
};

}  // namespace lps
