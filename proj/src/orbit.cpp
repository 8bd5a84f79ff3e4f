#include "ncps/orbit.hpp"

#include <cmath>

namespace ncps {

namespace {

void check_spec(const CircularOrbitSpec& spec) {
  const auto& sys = spec.sys;
  if (!std::isfinite(sys.m) || !std::isfinite(sys.k) || !std::isfinite(spec.r0) ||
      !std::isfinite(sys.nc.theta) || !std::isfinite(sys.nc.eta) ||
      !std::isfinite(sys.nc.gamma))
    throw Error(errc::invalid_parameter, "orbit parameters must be finite");
  if (!(spec.r0 > 0.0)) throw Error(errc::invalid_parameter, "orbit radius must be positive");
  if (sys.m == 0.0) throw Error(errc::invalid_parameter, "mass must be nonzero");
}

}  // namespace

OrbitSolution solve_orbit(const CircularOrbitSpec& spec) {
  check_spec(spec);
  const auto& sys = spec.sys;
  const double r3 = spec.r0 * spec.r0 * spec.r0;
  const double one_g = 1.0 + sys.nc.gamma;

  const double radicand = 4.0 * sys.k * (one_g * one_g - sys.nc.theta * sys.nc.eta) /
                              (sys.m * r3) +
                          std::pow(sys.k * sys.nc.theta / r3 + sys.nc.eta / sys.m, 2);
  if (radicand < 0.0)
    throw Error(errc::no_circular_orbit, "no circular orbit: negative radicand");

  const double shift = sys.k * sys.nc.theta / r3 + sys.nc.eta / sys.m;
  const double omega = spec.direction == Direction::CCW
                           ? 0.5 * (std::sqrt(radicand) - shift)
                           : 0.5 * (std::sqrt(radicand) + shift);
  if (!(omega > 0.0))
    throw Error(errc::degenerate_frequency, "computed frequency is not positive");
  if (one_g == 0.0)
    throw Error(errc::division_error, "gamma = -1 makes the momentum undefined");

  OrbitSolution sol;
  sol.direction = spec.direction;
  sol.omega = omega;
  sol.period = 2.0 * M_PI / omega;
  if (spec.direction == Direction::CCW)
    sol.p0 = (sys.m * omega * r3 + sys.k * sys.m * sys.nc.theta) /
             (spec.r0 * spec.r0 * one_g);
  else
    sol.p0 = -(sys.m * omega * r3 - sys.k * sys.m * sys.nc.theta) /
             (spec.r0 * spec.r0 * one_g);
  return sol;
}

double delta_omega(const KeplerSystem2D& sys, double r0) {
  check_spec({sys, r0, Direction::CCW});
  return sys.nc.eta / sys.m + sys.k * sys.nc.theta / (r0 * r0 * r0);
}

PhaseState2D circular_initial_conditions(const OrbitSolution& sol,
                                         const CircularOrbitSpec& spec) {
  return {spec.r0, 0.0, 0.0, sol.p0};
}

PhaseState2D circular_state(const OrbitSolution& sol, const CircularOrbitSpec& spec,
                            double t) {
  const double c = std::cos(sol.omega * t);
  const double s = std::sin(sol.omega * t);
  if (sol.direction == Direction::CCW)
    return {spec.r0 * c, spec.r0 * s, -sol.p0 * s, sol.p0 * c};
  return {spec.r0 * c, -spec.r0 * s, sol.p0 * s, sol.p0 * c};
}

Eigen::Vector4d circular_state_derivative(const OrbitSolution& sol,
                                          const CircularOrbitSpec& spec, double t) {
  const double w = sol.omega;
  const double c = std::cos(w * t);
  const double s = std::sin(w * t);
  if (sol.direction == Direction::CCW)
    return {-spec.r0 * w * s, spec.r0 * w * c, -sol.p0 * w * c, -sol.p0 * w * s};
  return {-spec.r0 * w * s, -spec.r0 * w * c, sol.p0 * w * c, -sol.p0 * w * s};
}

bool t_reversal_frequency_check(const KeplerSystem2D& sys, double r0, double rel_tol) {
  KeplerSystem2D flipped = sys;
  flipped.nc = time_reverse_params(sys.nc);

  const OrbitSolution ccw_flipped = solve_orbit({flipped, r0, Direction::CCW});
  const OrbitSolution cw = solve_orbit({sys, r0, Direction::CW});

  const double omega_err = std::abs(ccw_flipped.omega - cw.omega) /
                           std::max(std::abs(cw.omega), 1e-300);
  const double p0_err =
      std::abs(ccw_flipped.p0 + cw.p0) / std::max(std::abs(cw.p0), 1e-300);
  return omega_err <= rel_tol && p0_err <= rel_tol;
}

}  // namespace ncps
