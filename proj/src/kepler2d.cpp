#include "ncps/kepler2d.hpp"

#include <cmath>
#include <cstdio>

namespace ncps {

namespace {

constexpr double kEomSingularRadius = 1e-12;
constexpr double kIntegrateSingularRadius = 1e-9;
constexpr std::int64_t kMaxSteps = 10'000'000;

Eigen::Vector4d rhs_vec(const KeplerSystem2D& sys, const Eigen::Vector4d& u) {
  return eom_rhs(sys, state_from_vector(u));
}

Eigen::Vector4d rk4_step(const KeplerSystem2D& sys, const Eigen::Vector4d& u,
                         double dt) {
  const Eigen::Vector4d k1 = rhs_vec(sys, u);
  const Eigen::Vector4d k2 = rhs_vec(sys, u + 0.5 * dt * k1);
  const Eigen::Vector4d k3 = rhs_vec(sys, u + 0.5 * dt * k2);
  const Eigen::Vector4d k4 = rhs_vec(sys, u + dt * k3);
  return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_integration_args(double dt, std::int64_t n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(errc::invalid_parameter, "time step must be positive and finite");
  if (n_steps <= 0)
    throw Error(errc::invalid_parameter, "step count must be positive");
  if (n_steps > kMaxSteps)
    throw Error(errc::step_overflow, "step count exceeds the supported maximum");
}

void check_radius(const Eigen::Vector4d& u) {
  if (std::hypot(u[0], u[1]) < kIntegrateSingularRadius)
    throw Error(errc::origin_singularity, "trajectory reached the origin singularity");
}

}  // namespace

Eigen::Vector4d eom_rhs(const KeplerSystem2D& sys, const PhaseState2D& s) {
  const double r = std::hypot(s.x1, s.x2);
  if (r < kEomSingularRadius)
    throw Error(errc::origin_singularity, "state too close to the origin");
  const double r3 = r * r * r;
  const double one_g = 1.0 + sys.nc.gamma;
  const double kr3 = sys.k / r3;
  return {s.p1 * one_g / sys.m + kr3 * sys.nc.theta * s.x2,
          s.p2 * one_g / sys.m - kr3 * sys.nc.theta * s.x1,
          sys.nc.eta * s.p2 / sys.m - kr3 * s.x1 * one_g,
          -sys.nc.eta * s.p1 / sys.m - kr3 * s.x2 * one_g};
}

Trajectory integrate(const KeplerSystem2D& sys, const PhaseState2D& s0, double dt,
                     std::int64_t n_steps) {
  check_integration_args(dt, n_steps);
  Trajectory traj;
  traj.dt = dt;
  traj.samples.reserve(static_cast<std::size_t>(n_steps) + 1);

  Eigen::Vector4d u = to_vector(s0);
  check_radius(u);
  traj.samples.push_back({0.0, s0, kepler_energy(sys, s0)});
  for (std::int64_t i = 1; i <= n_steps; ++i) {
    u = rk4_step(sys, u, dt);
    check_radius(u);
    const PhaseState2D s = state_from_vector(u);
    traj.samples.push_back({static_cast<double>(i) * dt, s, kepler_energy(sys, s)});
  }
  return traj;
}

PhaseState2D advance(const KeplerSystem2D& sys, const PhaseState2D& s0, double dt,
                     std::int64_t n_steps) {
  check_integration_args(dt, n_steps);
  Eigen::Vector4d u = to_vector(s0);
  check_radius(u);
  for (std::int64_t i = 0; i < n_steps; ++i) {
    u = rk4_step(sys, u, dt);
    check_radius(u);
  }
  return state_from_vector(u);
}

double measure_period(const Trajectory& traj) {
  const auto& samples = traj.samples;
  if (samples.size() < 3)
    throw Error(errc::non_winding, "trajectory too short to wind");

  constexpr double two_pi = 2.0 * M_PI;
  double prev_phi = std::atan2(samples[0].state.x2, samples[0].state.x1);
  double unwound = 0.0;
  double direction = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double phi = std::atan2(samples[i].state.x2, samples[i].state.x1);
    double d = phi - prev_phi;
    // per-step increments are assumed below pi in magnitude
    if (d > M_PI) d -= two_pi;
    if (d < -M_PI) d += two_pi;
    if (direction == 0.0 && d != 0.0) direction = d > 0.0 ? 1.0 : -1.0;
    if (d * direction < 0.0)
      throw Error(errc::direction_reversal, "polar angle is not monotone");
    const double before = unwound;
    unwound += d;
    if (std::abs(unwound) >= two_pi) {
      const double frac = (two_pi - std::abs(before)) / std::abs(d);
      return samples[i - 1].t + frac * traj.dt;
    }
    prev_phi = phi;
  }
  throw Error(errc::non_winding, "trajectory winds by less than 2*pi");
}

double reversal_experiment(const KeplerSystem2D& sys, const PhaseState2D& s0,
                           double tau, double dt, bool flip_params_at_midpoint) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(errc::invalid_parameter, "tau must be positive and finite");
  const auto n_steps = static_cast<std::int64_t>(std::llround(tau / dt));
  if (n_steps <= 0)
    throw Error(errc::invalid_parameter, "tau shorter than one time step");

  const PhaseState2D mid = advance(sys, s0, dt, n_steps);
  KeplerSystem2D back = sys;
  if (flip_params_at_midpoint) back.nc = time_reverse_params(sys.nc);
  const PhaseState2D end =
      time_reverse_state(advance(back, time_reverse_state(mid), dt, n_steps));
  return (to_vector(end) - to_vector(s0)).norm();
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,X1,X2,P1,P2,H\n";
  char line[160];
  for (const auto& s : traj.samples) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                  s.state.x1, s.state.x2, s.state.p1, s.state.p2, s.energy);
    os << line;
  }
}

}  // namespace ncps
