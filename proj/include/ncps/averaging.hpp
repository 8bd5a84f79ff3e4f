#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>

#include "ncps/errors.hpp"
#include "ncps/extended.hpp"

namespace ncps {

// Oscillator ground states enter only through their Gaussian marginals:
// each auxiliary position component ~ N(0, l_p^2/2), each momentum
// component ~ N(0, 1/(2*l_p^2)); the variances multiply to the
// minimum-uncertainty 1/4.
struct GroundStateSpec {
  double l_p = 1.0;

  double position_variance() const { return 0.5 * l_p * l_p; }
  double momentum_variance() const { return 0.5 / (l_p * l_p); }
};

struct MCConfig {
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
};

// Ground-state expectations of the position-built tensor moments.
struct AnalyticMoments {
  double a_mean = 0.0;
  double pb_mean = 0.0;
  double a_sq = 0.0;        // <a_i^2>
  double pb_sq = 0.0;       // <(pb_i)^2>
  double theta_i_sq = 0.0;  // l0^2 * l_p^2 / 2
  double eta_i_sq = 0.0;    // p0^2 / (2 l_p^2)
  double theta_sq = 0.0;    // 3 * theta_i_sq
  double eta_sq = 0.0;      // 3 * eta_i_sq
};

AnalyticMoments moments_analytic(const GroundStateSpec& spec, const TensorConfig& cfg);

struct MomentEstimate {
  double analytic = 0.0;
  double mc = 0.0;
  double std_error = 0.0;

  bool within(double n_sigma) const {
    return std::abs(mc - analytic) <= n_sigma * std_error;
  }
};

struct MomentReport {
  std::array<MomentEstimate, 3> a_mean, pb_mean, a_sq, pb_sq, theta_i_sq, eta_i_sq;
  MomentEstimate theta_sq, eta_sq;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Same moments estimated from ground-state Gaussian draws; agreement with
// the analytic values within 3 standard errors is the acceptance yardstick.
MomentReport moments_mc(const GroundStateSpec& spec, const TensorConfig& cfg,
                        const MCConfig& mc);

struct EffectiveAverageResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double rejection_rate = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

using ParticleObservable =
    std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&)>;

// <H_s>_ab at a fixed particle point (x, p): the Kepler Hamiltonian built
// from the noncommutative (X, P) averaged over auxiliary momentum draws.
// Draws with |X| under the singularity guard are rejected and resampled;
// more than 1% rejection is an error.
EffectiveAverageResult effective_hamiltonian_mc(const TensorConfig& cfg,
                                                const GroundStateSpec& spec, double m,
                                                double k, const Eigen::Vector3d& x,
                                                const Eigen::Vector3d& p,
                                                const MCConfig& mc);

// Same machinery for a caller-supplied observable of (X, P).
EffectiveAverageResult effective_average_mc(const ParticleObservable& obs,
                                            const TensorConfig& cfg,
                                            const GroundStateSpec& spec,
                                            const Eigen::Vector3d& x,
                                            const Eigen::Vector3d& p,
                                            const MCConfig& mc);

struct PairedComparison {
  double difference = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;

  bool consistent_with_zero(double n_sigma) const {
    return std::abs(difference) <= n_sigma * std_error;
  }
};

// E[H(cfg_a) - H(cfg_b)] with common random numbers, sharing every draw
// between the two configurations.
PairedComparison effective_hamiltonian_paired_diff(
    const TensorConfig& cfg_a, const TensorConfig& cfg_b, const GroundStateSpec& spec,
    double m, double k, const Eigen::Vector3d& x, const Eigen::Vector3d& p,
    const MCConfig& mc);

// Central-difference d<H_s>/dc_theta at c_theta = 0 with common random
// numbers; vanishes because the first moments of the tensors vanish.
PairedComparison effective_hamiltonian_ctheta_derivative(
    const TensorConfig& cfg, const GroundStateSpec& spec, double m, double k,
    const Eigen::Vector3d& x, const Eigen::Vector3d& p, const MCConfig& mc,
    double step = 1e-3);

}  // namespace ncps
