#pragma once

#include "ncps/bracket2d.hpp"
#include "ncps/kepler2d.hpp"

namespace ncps {

enum class Direction { CCW, CW };

struct CircularOrbitSpec {
  KeplerSystem2D sys;
  double r0 = 1.0;
  Direction direction = Direction::CCW;
};

// Closed-form circular orbit: both frequencies are reported positive,
// direction is carried separately. period * omega == 2*pi by construction.
struct OrbitSolution {
  double omega = 0.0;
  double period = 0.0;
  double p0 = 0.0;  // signed initial momentum magnitude
  Direction direction = Direction::CCW;
};

OrbitSolution solve_orbit(const CircularOrbitSpec& spec);

// omega_cw - omega_ccw = eta/m + k*theta/r0^3, the direction asymmetry.
double delta_omega(const KeplerSystem2D& sys, double r0);

// State (r0, 0, 0, p0) matching the analytic solution at t = 0.
PhaseState2D circular_initial_conditions(const OrbitSolution& sol,
                                         const CircularOrbitSpec& spec);

// Analytic circular solution and its time derivative at time t.
PhaseState2D circular_state(const OrbitSolution& sol, const CircularOrbitSpec& spec,
                            double t);
Eigen::Vector4d circular_state_derivative(const OrbitSolution& sol,
                                          const CircularOrbitSpec& spec, double t);

// True when flipping (theta, eta) maps the CCW solution onto the CW one:
// omega(-theta,-eta) == omega_cw and p0(-theta,-eta) == -p0_cw.
bool t_reversal_frequency_check(const KeplerSystem2D& sys, double r0,
                                double rel_tol = 1e-12);

}  // namespace ncps
