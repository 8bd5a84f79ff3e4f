#include "ncps/extended.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace ncps {

namespace {

constexpr std::int64_t kMaxSteps = 10'000'000;

using Vec18 = Eigen::Matrix<double, 18, 1>;

Vec18 flow_rhs(const TensorConfig& cfg, const Vec18& u, double m, double k) {
  const auto grad =
      total_hamiltonian(cfg, seed_state(extended_from_vector(u)), m, k).grad;
  Vec18 du;
  for (int blk = 0; blk < 3; ++blk) {
    const int q0 = 6 * blk;
    for (int i = 0; i < 3; ++i) {
      du[q0 + i] = grad[q0 + 3 + i];       // dq/dt =  dH/dp
      du[q0 + 3 + i] = -grad[q0 + i];      // dp/dt = -dH/dq
    }
  }
  return du;
}

Vec18 rk4_step(const TensorConfig& cfg, const Vec18& u, double m, double k,
               double dt) {
  const Vec18 k1 = flow_rhs(cfg, u, m, k);
  const Vec18 k2 = flow_rhs(cfg, u + 0.5 * dt * k1, m, k);
  const Vec18 k3 = flow_rhs(cfg, u + 0.5 * dt * k2, m, k);
  const Vec18 k4 = flow_rhs(cfg, u + dt * k3, m, k);
  return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

NCTensors tensors_from_state(const TensorConfig& cfg, const ExtendedState& s) {
  NCTensors t;
  t.theta = cfg.c_theta * levi_civita_contraction<double>(s.pa);
  t.eta = cfg.c_eta * levi_civita_contraction<double>(s.pb);
  t.gamma = t.theta * t.eta.transpose() / 4.0;
  return t;
}

NCTensors tensors_alternative(const TensorConfig& cfg, const ExtendedState& s) {
  NCTensors t;
  t.theta = cfg.l0 * levi_civita_contraction<double>(s.a);
  t.eta = cfg.p0 * levi_civita_contraction<double>(s.pb);
  t.gamma = t.theta * t.eta.transpose() / 4.0;
  return t;
}

double AlgebraResiduals::max() const {
  return std::max({xx, pp, xp, tensor_commute});
}

AlgebraResiduals verify_algebra(const TensorConfig& cfg, const ExtendedState& s) {
  const NCTensors expected = tensors_from_state(cfg, s);
  AlgebraResiduals res;

  auto obs = [&cfg](ExtObservable::Kind kind, int i, int j = 0) {
    ExtObservable o;
    o.kind = kind;
    o.i = i;
    o.j = j;
    o.cfg = cfg;
    return o;
  };

  using Kind = ExtObservable::Kind;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double xx = bracket_extended(obs(Kind::NCX, i), obs(Kind::NCX, j), s);
      const double pp = bracket_extended(obs(Kind::NCP, i), obs(Kind::NCP, j), s);
      const double xp = bracket_extended(obs(Kind::NCX, i), obs(Kind::NCP, j), s);
      res.xx = std::max(res.xx, std::abs(xx - expected.theta(i, j)));
      res.pp = std::max(res.pp, std::abs(pp - expected.eta(i, j)));
      const double delta = i == j ? 1.0 : 0.0;
      res.xp = std::max(res.xp, std::abs(xp - (delta + expected.gamma(i, j))));
    }
  }

  // the tensors must commute with every noncommutative coordinate and momentum
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      for (int kk = 0; kk < 3; ++kk) {
        for (const auto tensor : {Kind::ThetaEntry, Kind::EtaEntry}) {
          const auto te = obs(tensor, i, j);
          res.tensor_commute = std::max(
              {res.tensor_commute,
               std::abs(bracket_extended(te, obs(Kind::NCX, kk), s)),
               std::abs(bracket_extended(te, obs(Kind::NCP, kk), s))});
        }
      }
    }
  }
  return res;
}

ExtendedState rotate_extended(const ExtendedState& s, const Eigen::Vector3d& axis,
                              double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-12)
    throw Error(errc::non_unit_axis, "rotation axis must be a unit vector");
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  return {r * s.x, r * s.p, r * s.a, r * s.pa, r * s.b, r * s.pb};
}

ExtendedState time_reverse_extended(const ExtendedState& s) {
  return {s.x, -s.p, s.a, -s.pa, s.b, -s.pb};
}

ExtendedState advance_extended(const TensorConfig& cfg, const ExtendedState& s0,
                               double m, double k, double dt, std::int64_t n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(errc::invalid_parameter, "time step must be positive and finite");
  if (n_steps <= 0) throw Error(errc::invalid_parameter, "step count must be positive");
  if (n_steps > kMaxSteps)
    throw Error(errc::step_overflow, "step count exceeds the supported maximum");

  Vec18 u = to_vector(s0);
  for (std::int64_t i = 0; i < n_steps; ++i) u = rk4_step(cfg, u, m, k, dt);
  return extended_from_vector(u);
}

double reversal_experiment_extended(const TensorConfig& cfg, const ExtendedState& s0,
                                    double m, double k, double tau, double dt) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(errc::invalid_parameter, "tau must be positive and finite");
  const auto n_steps = static_cast<std::int64_t>(std::llround(tau / dt));
  if (n_steps <= 0)
    throw Error(errc::invalid_parameter, "tau shorter than one time step");

  const ExtendedState mid = advance_extended(cfg, s0, m, k, dt, n_steps);
  const ExtendedState end = time_reverse_extended(
      advance_extended(cfg, time_reverse_extended(mid), m, k, dt, n_steps));
  return (to_vector(end) - to_vector(s0)).norm();
}

Vec18 to_vector(const ExtendedState& s) {
  Vec18 v;
  v << s.x, s.p, s.a, s.pa, s.b, s.pb;
  return v;
}

ExtendedState extended_from_vector(const Vec18& v) {
  ExtendedState s;
  s.x = v.segment<3>(0);
  s.p = v.segment<3>(3);
  s.a = v.segment<3>(6);
  s.pa = v.segment<3>(9);
  s.b = v.segment<3>(12);
  s.pb = v.segment<3>(15);
  return s;
}

}  // namespace ncps
