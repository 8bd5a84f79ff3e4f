#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <ostream>
#include <vector>

#include "ncps/bracket2d.hpp"
#include "ncps/errors.hpp"

namespace ncps {

// Kepler attraction -k/X on the deformed 2D phase space.
struct KeplerSystem2D {
  double m = 1.0;
  double k = 1.0;
  NCParams2D nc;
};

// H = (P1^2 + P2^2)/2m - k/|X|, scalar-generic so it can feed the bracket
// machinery directly.
inline auto kepler_hamiltonian(const KeplerSystem2D& sys) {
  return [sys](const auto& s) {
    using std::sqrt;
    const auto r2 = s.x1 * s.x1 + s.x2 * s.x2;
    return (s.p1 * s.p1 + s.p2 * s.p2) / (2.0 * sys.m) - sys.k / sqrt(r2);
  };
}

inline double kepler_energy(const KeplerSystem2D& sys, const PhaseState2D& s) {
  return kepler_hamiltonian(sys)(s);
}

// Bracket-generated equations of motion, written out in closed form.
Eigen::Vector4d eom_rhs(const KeplerSystem2D& sys, const PhaseState2D& s);

struct Trajectory {
  struct Sample {
    double t;
    PhaseState2D state;
    double energy;
  };
  double dt = 0.0;
  std::vector<Sample> samples;
};

// Classical fixed-step RK4. Aborts when the orbit falls into the 1/X^3
// singularity (|X| < 1e-9 along the way).
Trajectory integrate(const KeplerSystem2D& sys, const PhaseState2D& s0, double dt,
                     std::int64_t n_steps);

// Final state only; same stepping as integrate without storing the record.
PhaseState2D advance(const KeplerSystem2D& sys, const PhaseState2D& s0, double dt,
                     std::int64_t n_steps);

// Time for the unwound polar angle to sweep 2*pi, interpolated linearly
// between samples. The winding direction is irrelevant but must not flip.
double measure_period(const Trajectory& traj);

// Forward tau, flip the state (x -> x, p -> -p), forward tau, flip again;
// returns the distance from the start. The bracket parameters are not
// flipped unless flip_params_at_midpoint is set, so a nonzero distance is
// the broken-symmetry signal.
double reversal_experiment(const KeplerSystem2D& sys, const PhaseState2D& s0,
                           double tau, double dt, bool flip_params_at_midpoint = false);

// CSV record "t,X1,X2,P1,P2,H" at 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace ncps
