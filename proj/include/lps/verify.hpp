#pragma once

#include "lps/field.hpp"
#include "lps/parser.hpp"
#include "lps/ratfunc.hpp"

// Identity checks written directly from the definitions, sharing nothing with
// the linear-system assembly beyond polynomial arithmetic.

namespace lps {

/// X(U) - k div(X) U for U = V_num / V_den, so that V = U^(1/k) satisfies
/// X(V) = div(X) V exactly when the residual is zero.
inline RatFunc inverse_integrating_factor_residual(const RationalODE& ode, const MPoly& V_num, const MPoly& V_den,
                                                   int k = 1) {
  const MPoly& M = ode.M;
  const MPoly& N = ode.N;
  RatFunc U(V_num, V_den);
  RatFunc div(N.derivative(Var::x) + M.derivative(Var::y));
  RatFunc XU = RatFunc(N) * U.derivative(Var::x) + RatFunc(M) * U.derivative(Var::y);
  return XU - RatFunc(MPoly(Rat(k))) * div * U;
}

inline bool check_inverse_integrating_factor(const RationalODE& ode, const MPoly& V_num,
                                             const MPoly& V_den = MPoly(Rat(1)), int k = 1) {
  if (V_num.is_zero()) return false;
  return inverse_integrating_factor_residual(ode, V_num, V_den, k).is_zero();
}

/// (M dx - N dy) / V closed, V = U^(1/k). Dividing the condition by V^(-1)
/// leaves M_y + N_x - (M U_y + N U_x) / (k U) = 0.
inline bool check_closedness(const RationalODE& ode, const MPoly& V_num, const MPoly& V_den = MPoly(Rat(1)),
                             int k = 1) {
  if (V_num.is_zero()) return false;
  const RatFunc M(ode.M), N(ode.N);
  RatFunc U(V_num, V_den);
  if (k == 1) {
    RatFunc R = RatFunc(V_den, V_num);
    return ((M * R).derivative(Var::y) + (N * R).derivative(Var::x)).is_zero();
  }
  RatFunc lhs = M.derivative(Var::y) + N.derivative(Var::x);
  RatFunc rhs = (M * U.derivative(Var::y) + N * U.derivative(Var::x)) / (RatFunc(MPoly(Rat(k))) * U);
  return (lhs - rhs).is_zero();
}

/// N^2 P_x + z N^2 P_y + N M P_z - (M_z N - M N_z) P, from the Cartan field
/// d/dx + z d/dy + (M/N) d/dz and its divergence (M/N)_z.
inline RatFunc jacobi_multiplier_residual(const RationalODE& ode, const MPoly& P) {
  RatFunc phi(ode.M, ode.N);
  RatFunc p(P);
  RatFunc XP = p.derivative(Var::x) + RatFunc(MPoly::var(Var::z)) * p.derivative(Var::y) + phi * p.derivative(Var::z);
  return XP - phi.derivative(Var::z) * p;
}

inline bool check_jacobi_multiplier(const RationalODE& ode, const MPoly& P) {
  if (P.is_zero()) return false;
  return jacobi_multiplier_residual(ode, P).is_zero();
}

}  // namespace lps
