#pragma once

#include <Eigen/Core>

#include "ncps/dual.hpp"
#include "ncps/errors.hpp"

namespace ncps {

// Deformation constants of the 2D algebra: {X1,X2} = theta,
// {Xi,Pi} = 1 + gamma, {P1,P2} = eta.
struct NCParams2D {
  double theta = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
};

template <typename S>
struct PhaseState2DT {
  S x1, x2, p1, p2;
};
using PhaseState2D = PhaseState2DT<double>;

inline Eigen::Vector4d to_vector(const PhaseState2D& s) {
  return {s.x1, s.x2, s.p1, s.p2};
}
inline PhaseState2D state_from_vector(const Eigen::Vector4d& v) {
  return {v[0], v[1], v[2], v[3]};
}

enum class Var2D { X1 = 0, X2 = 1, P1 = 2, P2 = 3 };

// {u_i, u_j} for the fundamental variables, antisymmetric completion included.
inline double fundamental_bracket(Var2D i, Var2D j, const NCParams2D& prm) {
  const int a = static_cast<int>(i);
  const int b = static_cast<int>(j);
  if (a == b) return 0.0;
  if (a > b) return -fundamental_bracket(j, i, prm);
  // a < b, ordered pairs over (X1, X2, P1, P2)
  if (a == 0 && b == 1) return prm.theta;
  if (a == 0 && b == 2) return 1.0 + prm.gamma;
  if (a == 1 && b == 3) return 1.0 + prm.gamma;
  if (a == 2 && b == 3) return prm.eta;
  return 0.0;  // {X1,P2}, {X2,P1}
}

template <typename S>
PhaseState2DT<Dual<S, 4>> seed_state(const PhaseState2DT<S>& s) {
  return {Dual<S, 4>::seeded(s.x1, 0), Dual<S, 4>::seeded(s.x2, 1),
          Dual<S, 4>::seeded(s.p1, 2), Dual<S, 4>::seeded(s.p2, 3)};
}

// Deformed Poisson bracket of two scalar observables, extended from the
// fundamental brackets by the Leibniz chain rule. Works at any scalar level,
// so brackets of brackets are exact.
template <typename F, typename G, typename S>
S poisson_bracket(const F& f, const G& g, const NCParams2D& prm,
                  const PhaseState2DT<S>& s) {
  const auto ds = seed_state(s);
  const Dual<S, 4> fv = f(ds);
  const Dual<S, 4> gv = g(ds);
  S acc = S(0);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double w =
          fundamental_bracket(static_cast<Var2D>(i), static_cast<Var2D>(j), prm);
      if (w != 0.0) acc += w * (fv.grad[i] * gv.grad[j] - fv.grad[j] * gv.grad[i]);
    }
  }
  return acc;
}

// Classical time reversal flips the signs of theta and eta; gamma survives.
inline NCParams2D time_reverse_params(const NCParams2D& p) {
  return {-p.theta, -p.eta, p.gamma};
}

// x -> x, p -> -p.
inline PhaseState2D time_reverse_state(const PhaseState2D& s) {
  return {s.x1, s.x2, -s.p1, -s.p2};
}

}  // namespace ncps
