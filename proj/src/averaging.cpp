#include "ncps/averaging.hpp"

#include <cmath>
#include <vector>

#include "ncps/rng.hpp"
#include "ncps/summation.hpp"

namespace ncps {

namespace {

constexpr double kRadiusGuard = 1e-6;

// Streaming mean/stderr with tree summation of fixed-size chunks.
class MeanAccumulator {
 public:
  void push(double v) {
    buf_[fill_++] = v;
    sq_buf_[fill_sq_++] = v * v;
    if (fill_ == buf_.size()) flush();
  }

  double mean(std::int64_t n) {
    flush();
    return pairwise_sum(sums_) / static_cast<double>(n);
  }

  double std_error(std::int64_t n) {
    flush();
    const double nn = static_cast<double>(n);
    const double m = pairwise_sum(sums_) / nn;
    const double var = (pairwise_sum(sq_sums_) - nn * m * m) / (nn - 1.0);
    return std::sqrt(std::max(var, 0.0) / nn);
  }

 private:
  void flush() {
    if (fill_ > 0) {
      sums_.push_back(pairwise_sum({buf_.data(), fill_}));
      sq_sums_.push_back(pairwise_sum({sq_buf_.data(), fill_sq_}));
      fill_ = fill_sq_ = 0;
    }
  }

  std::array<double, 4096> buf_{}, sq_buf_{};
  std::size_t fill_ = 0, fill_sq_ = 0;
  std::vector<double> sums_, sq_sums_;
};

void check_sampler(const GroundStateSpec& spec, const MCConfig& mc) {
  if (!(spec.l_p > 0.0) || !std::isfinite(spec.l_p))
    throw Error(errc::degenerate_sampler, "oscillator length must be positive");
  if (mc.n_samples < 1)
    throw Error(errc::invalid_parameter, "sample count must be positive");
}

MomentEstimate finish(MeanAccumulator& acc, double analytic, std::int64_t n) {
  return {analytic, acc.mean(n), acc.std_error(n)};
}

}  // namespace

AnalyticMoments moments_analytic(const GroundStateSpec& spec, const TensorConfig& cfg) {
  AnalyticMoments m;
  m.a_sq = spec.position_variance();
  m.pb_sq = spec.momentum_variance();
  m.theta_i_sq = cfg.l0 * cfg.l0 * m.a_sq;
  m.eta_i_sq = cfg.p0 * cfg.p0 * m.pb_sq;
  m.theta_sq = 3.0 * m.theta_i_sq;
  m.eta_sq = 3.0 * m.eta_i_sq;
  return m;
}

MomentReport moments_mc(const GroundStateSpec& spec, const TensorConfig& cfg,
                        const MCConfig& mc) {
  check_sampler(spec, mc);
  const AnalyticMoments an = moments_analytic(spec, cfg);
  const double sigma_pos = std::sqrt(spec.position_variance());
  const double sigma_mom = std::sqrt(spec.momentum_variance());

  std::array<MeanAccumulator, 3> a_mean, pb_mean, a_sq, pb_sq, th_sq, et_sq;
  MeanAccumulator th_total, et_total;

  GaussianStream rng(mc.seed);
  for (std::int64_t it = 0; it < mc.n_samples; ++it) {
    double th2 = 0.0, et2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double a = rng.next(sigma_pos);
      const double pb = rng.next(sigma_mom);
      a_mean[i].push(a);
      pb_mean[i].push(pb);
      a_sq[i].push(a * a);
      pb_sq[i].push(pb * pb);
      const double th = cfg.l0 * a;
      const double et = cfg.p0 * pb;
      th_sq[i].push(th * th);
      et_sq[i].push(et * et);
      th2 += th * th;
      et2 += et * et;
    }
    th_total.push(th2);
    et_total.push(et2);
  }

  MomentReport rep;
  rep.n_samples = mc.n_samples;
  rep.seed = mc.seed;
  for (int i = 0; i < 3; ++i) {
    rep.a_mean[i] = finish(a_mean[i], an.a_mean, mc.n_samples);
    rep.pb_mean[i] = finish(pb_mean[i], an.pb_mean, mc.n_samples);
    rep.a_sq[i] = finish(a_sq[i], an.a_sq, mc.n_samples);
    rep.pb_sq[i] = finish(pb_sq[i], an.pb_sq, mc.n_samples);
    rep.theta_i_sq[i] = finish(th_sq[i], an.theta_i_sq, mc.n_samples);
    rep.eta_i_sq[i] = finish(et_sq[i], an.eta_i_sq, mc.n_samples);
  }
  rep.theta_sq = finish(th_total, an.theta_sq, mc.n_samples);
  rep.eta_sq = finish(et_total, an.eta_sq, mc.n_samples);
  return rep;
}

namespace {

struct AuxDraw {
  Eigen::Vector3d pa, pb;
};

// Evaluates obs at the noncommutative point for one auxiliary draw;
// returns false when the draw trips the |X| singularity guard.
bool evaluate(const ParticleObservable& obs, const TensorConfig& cfg,
              const Eigen::Vector3d& x, const Eigen::Vector3d& p, const AuxDraw& d,
              double* out) {
  const Eigen::Vector3d X = x + 0.5 * cfg.c_theta * d.pa.cross(p);
  const Eigen::Vector3d P = p + 0.5 * cfg.c_eta * x.cross(d.pb);
  if (X.norm() < kRadiusGuard) return false;
  *out = obs(X, P);
  return true;
}

template <typename PerDraw>
EffectiveAverageResult run_rejection_loop(const GroundStateSpec& spec,
                                          const MCConfig& mc, const PerDraw& eval) {
  check_sampler(spec, mc);
  const double sigma_mom = std::sqrt(spec.momentum_variance());
  GaussianStream rng(mc.seed);

  MeanAccumulator acc;
  std::int64_t accepted = 0, total = 0;
  const std::int64_t cap = 2 * mc.n_samples;
  while (accepted < mc.n_samples && total < cap) {
    AuxDraw d;
    for (int i = 0; i < 3; ++i) d.pa[i] = rng.next(sigma_mom);
    for (int i = 0; i < 3; ++i) d.pb[i] = rng.next(sigma_mom);
    ++total;
    double v = 0.0;
    if (!eval(d, &v)) continue;
    acc.push(v);
    ++accepted;
  }
  const double rate =
      static_cast<double>(total - accepted) / static_cast<double>(total);
  if (accepted < mc.n_samples || rate > 0.01)
    throw Error(errc::excessive_rejection,
                "more than 1% of draws hit the singularity guard");

  EffectiveAverageResult res;
  res.estimate = acc.mean(accepted);
  res.std_error = acc.std_error(accepted);
  res.rejection_rate = rate;
  res.n_samples = accepted;
  res.seed = mc.seed;
  return res;
}

ParticleObservable kepler_observable(double m, double k) {
  return [m, k](const Eigen::Vector3d& X, const Eigen::Vector3d& P) {
    return P.squaredNorm() / (2.0 * m) - k / X.norm();
  };
}

}  // namespace

EffectiveAverageResult effective_average_mc(const ParticleObservable& obs,
                                            const TensorConfig& cfg,
                                            const GroundStateSpec& spec,
                                            const Eigen::Vector3d& x,
                                            const Eigen::Vector3d& p,
                                            const MCConfig& mc) {
  return run_rejection_loop(spec, mc, [&](const AuxDraw& d, double* out) {
    return evaluate(obs, cfg, x, p, d, out);
  });
}

EffectiveAverageResult effective_hamiltonian_mc(const TensorConfig& cfg,
                                                const GroundStateSpec& spec, double m,
                                                double k, const Eigen::Vector3d& x,
                                                const Eigen::Vector3d& p,
                                                const MCConfig& mc) {
  return effective_average_mc(kepler_observable(m, k), cfg, spec, x, p, mc);
}

PairedComparison effective_hamiltonian_paired_diff(
    const TensorConfig& cfg_a, const TensorConfig& cfg_b, const GroundStateSpec& spec,
    double m, double k, const Eigen::Vector3d& x, const Eigen::Vector3d& p,
    const MCConfig& mc) {
  const ParticleObservable obs = kepler_observable(m, k);
  // a pair counts only when both configurations clear the guard, keeping the
  // common-random-number pairing intact
  const auto res = run_rejection_loop(spec, mc, [&](const AuxDraw& d, double* out) {
    double va = 0.0, vb = 0.0;
    if (!evaluate(obs, cfg_a, x, p, d, &va)) return false;
    if (!evaluate(obs, cfg_b, x, p, d, &vb)) return false;
    *out = va - vb;
    return true;
  });
  return {res.estimate, res.std_error, res.n_samples};
}

PairedComparison effective_hamiltonian_ctheta_derivative(
    const TensorConfig& cfg, const GroundStateSpec& spec, double m, double k,
    const Eigen::Vector3d& x, const Eigen::Vector3d& p, const MCConfig& mc,
    double step) {
  TensorConfig up = cfg, dn = cfg;
  up.c_theta = step;
  dn.c_theta = -step;
  PairedComparison diff =
      effective_hamiltonian_paired_diff(up, dn, spec, m, k, x, p, mc);
  diff.difference /= 2.0 * step;
  diff.std_error /= 2.0 * step;
  return diff;
}

}  // namespace ncps
