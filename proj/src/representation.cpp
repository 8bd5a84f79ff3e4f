#include "ncps/representation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ncps {

InducedAlgebra induced_algebra(const RepParams& rp) {
  const double e2 = rp.eps * rp.eps;
  InducedAlgebra out;
  out.theta = e2 * (rp.theta1p + rp.theta2p);
  out.eta = e2 * (rp.eta1p + rp.eta2p);
  out.gamma11 = e2 * (1.0 + rp.theta1p * rp.eta1p) - 1.0;
  out.gamma22 = e2 * (1.0 + rp.theta2p * rp.eta2p) - 1.0;
  return out;
}

RepParams solve_general(double theta, double eta, double gamma, Branch branch) {
  if (theta == 0.0 || eta == 0.0)
    throw Error(errc::zero_parameter, "general branch solution needs theta != 0 and eta != 0");
  if (gamma > theta * eta / 4.0)
    throw Error(errc::gamma_constraint, "gamma exceeds theta*eta/4");

  const double disc_theta = theta * theta - 4.0 * theta * gamma / eta;
  const double disc_eta = eta * eta - 4.0 * eta * gamma / theta;
  if (disc_theta < 0.0 || disc_eta < 0.0)
    throw Error(errc::constraint_violation,
                "matching equations have no real solution (theta*eta must be positive)");

  const double st = std::sqrt(disc_theta);
  const double se = std::sqrt(disc_eta);
  // the sign choices are anticorrelated between the theta' and eta' pairs
  const double sign = branch == Branch::Plus ? 1.0 : -1.0;

  RepParams rp;
  rp.eps = 1.0;
  rp.theta1p = 0.5 * (theta + sign * st);
  rp.theta2p = theta - rp.theta1p;
  rp.eta1p = 0.5 * (eta - sign * se);
  rp.eta2p = eta - rp.eta1p;
  return rp;
}

namespace {

// Reduced matching equation for the gamma = 0 family with theta2p fixed.
// With c = theta1p*eta1p the remaining equations collapse to g(c) = 0 where
// g(c) = (theta*(1+c) - theta2p) * (eta*(1+c) - c/theta2p) - c,
// a quadratic in c on the admissible domain c > -1.
struct ReducedQuadratic {
  double a2, a1, a0;
  double operator()(double c) const { return (a2 * c + a1) * c + a0; }
  double derivative(double c) const { return 2.0 * a2 * c + a1; }
};

std::optional<double> polish_newton(const ReducedQuadratic& g, double c0) {
  double c = c0;
  for (int it = 0; it < 60; ++it) {
    const double val = g(c);
    if (std::abs(val) < 1e-13 && c > -1.0) return c;
    const double der = g.derivative(c);
    if (der == 0.0) break;
    c -= val / der;
    if (!std::isfinite(c)) break;
  }
  if (std::isfinite(c) && std::abs(g(c)) < 1e-12 && c > -1.0) return c;
  return std::nullopt;
}

double solve_reduced(double theta, double eta, double theta2p) {
  ReducedQuadratic g;
  g.a2 = theta * (eta - 1.0 / theta2p);
  g.a1 = theta * eta + (theta - theta2p) * (eta - 1.0 / theta2p) - 1.0;
  g.a0 = (theta - theta2p) * eta;

  const double scale = std::max({std::abs(g.a2), std::abs(g.a1), std::abs(g.a0)});
  if (scale < 1e-300) return 0.0;  // identically zero: whole family solves, take c = 0

  // candidate roots from the stable quadratic formula seed the Newton polish
  std::optional<double> best;
  auto consider = [&](double c0) {
    if (auto c = polish_newton(g, c0)) {
      if (!best || std::abs(*c) < std::abs(*best)) best = *c;
    }
  };
  if (g.a2 != 0.0) {
    const double disc = g.a1 * g.a1 - 4.0 * g.a2 * g.a0;
    if (disc >= 0.0) {
      const double q = -0.5 * (g.a1 + std::copysign(std::sqrt(disc), g.a1));
      consider(q / g.a2);
      if (q != 0.0) consider(g.a0 / q);
    }
  } else if (g.a1 != 0.0) {
    consider(-g.a0 / g.a1);
  }
  // bisection fallback over a sign-change scan of the admissible domain
  if (!best) {
    double prev_c = -1.0 + 1e-9;
    double prev_g = g(prev_c);
    for (int i = 1; i <= 4000; ++i) {
      const double c = -1.0 + 1e-9 + i * (101.0 / 4000.0);
      const double val = g(c);
      if (prev_g == 0.0) consider(prev_c);
      if (prev_g * val < 0.0) {
        double lo = prev_c, hi = c, glo = prev_g;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid);
          if (glo * gm <= 0.0) hi = mid;
          else lo = mid, glo = gm;
        }
        consider(0.5 * (lo + hi));
      }
      prev_c = c;
      prev_g = val;
    }
  }
  if (!best)
    throw Error(errc::no_solution,
                "no admissible root of the reduced matching equation");
  return *best;
}

}  // namespace

RepParams solve_gamma_zero(double theta, double eta, double theta2p_choice) {
  RepParams rp;
  if (theta2p_choice == 0.0) {
    // closed form: eps = 1, theta1p = theta, eta1p = 0, eta2p = eta
    rp.eps = 1.0;
    rp.theta1p = theta;
    rp.theta2p = 0.0;
    rp.eta1p = 0.0;
    rp.eta2p = eta;
    return rp;
  }

  const double c = solve_reduced(theta, eta, theta2p_choice);
  rp.eps = 1.0 / std::sqrt(1.0 + c);
  rp.theta2p = theta2p_choice;
  rp.theta1p = theta * (1.0 + c) - theta2p_choice;
  rp.eta2p = c / theta2p_choice;
  rp.eta1p = eta * (1.0 + c) - rp.eta2p;

  const InducedAlgebra ind = induced_algebra(rp);
  const double scale = std::max({1.0, std::abs(theta), std::abs(eta)});
  if (std::abs(ind.theta - theta) > 1e-10 * scale ||
      std::abs(ind.eta - eta) > 1e-10 * scale || std::abs(ind.gamma11) > 1e-10 ||
      std::abs(ind.gamma22) > 1e-10)
    throw Error(errc::no_solution, "root does not reproduce the requested algebra");
  return rp;
}

RepParams symmetric_reps_gamma_zero(double theta, double eta, Branch branch) {
  if (theta == 0.0 || eta == 0.0)
    throw Error(errc::zero_parameter, "symmetric representation needs theta != 0 and eta != 0");
  if (theta * eta > 1.0)
    throw Error(errc::constraint_violation, "theta*eta must not exceed 1");

  const double root = std::sqrt(1.0 - theta * eta);
  const double f = branch == Branch::Plus ? 1.0 + root : 1.0 - root;

  RepParams rp;
  rp.theta1p = rp.theta2p = f / eta;
  rp.eta1p = rp.eta2p = f / theta;
  const double scale2 = 1.0 + rp.theta1p * rp.eta1p;
  if (!(scale2 > 0.0))
    throw Error(errc::constraint_violation,
                "representation scale is imaginary for this branch");
  rp.eps = 1.0 / std::sqrt(scale2);
  return rp;
}

}  // namespace ncps
