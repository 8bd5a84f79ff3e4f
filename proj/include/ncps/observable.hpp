#pragma once

#include <Eigen/Core>

#include <functional>
#include <utility>

#include "ncps/bracket2d.hpp"
#include "ncps/dual.hpp"

namespace ncps {

// Runtime-composable observable on 2D phase space: a value function paired
// with a gradient mechanism. Built from a scalar-generic callable the
// gradient is exact (forward duals); from a plain double function it falls
// back to central finite differences with fixed step 1e-6.
class Observable2D {
 public:
  using ValueFn = std::function<double(const PhaseState2D&)>;
  using GradFn = std::function<Eigen::Vector4d(const PhaseState2D&)>;

  Observable2D(ValueFn value, GradFn grad)
      : value_(std::move(value)), grad_(std::move(grad)) {}

  // F must accept PhaseState2DT<S> for any scalar S.
  template <typename F>
  static Observable2D from_function(F f) {
    ValueFn v = [f](const PhaseState2D& s) { return f(s); };
    GradFn g = [f](const PhaseState2D& s) {
      const Dual<double, 4> r = f(seed_state(s));
      return Eigen::Vector4d(r.grad);
    };
    return Observable2D(std::move(v), std::move(g));
  }

  static Observable2D from_value_fn(ValueFn f) {
    GradFn g = [f](const PhaseState2D& s) { return fd_gradient(f, s); };
    return Observable2D(std::move(f), std::move(g));
  }

  static Observable2D with_gradient(ValueFn f, GradFn g) {
    return Observable2D(std::move(f), std::move(g));
  }

  double operator()(const PhaseState2D& s) const { return value_(s); }
  Eigen::Vector4d gradient(const PhaseState2D& s) const { return grad_(s); }

  static Eigen::Vector4d fd_gradient(const ValueFn& f, const PhaseState2D& s,
                                     double h = 1e-6) {
    Eigen::Vector4d g;
    Eigen::Vector4d u = to_vector(s);
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d up = u, dn = u;
      up[i] += h;
      dn[i] -= h;
      g[i] = (f(state_from_vector(up)) - f(state_from_vector(dn))) / (2.0 * h);
    }
    return g;
  }

 private:
  ValueFn value_;
  GradFn grad_;
};

inline double poisson_bracket(const Observable2D& f, const Observable2D& g,
                              const NCParams2D& prm, const PhaseState2D& s) {
  const Eigen::Vector4d fg = f.gradient(s);
  const Eigen::Vector4d gg = g.gradient(s);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double w =
          fundamental_bracket(static_cast<Var2D>(i), static_cast<Var2D>(j), prm);
      if (w != 0.0) acc += w * (fg[i] * gg[j] - fg[j] * gg[i]);
    }
  }
  return acc;
}

}  // namespace ncps
