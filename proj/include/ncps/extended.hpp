#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <utility>

#include "ncps/dual.hpp"
#include "ncps/errors.hpp"

namespace ncps {

template <typename S>
using Vec3T = Eigen::Matrix<S, 3, 1>;

// Particle (x, p) plus two auxiliary oscillator pairs (a, pa) and (b, pb).
// Eighteen canonical variables in total; all cross-sector brackets vanish.
template <typename S>
struct ExtendedStateT {
  Vec3T<S> x, p, a, pa, b, pb;
};
using ExtendedState = ExtendedStateT<double>;

// Couplings of the state-built noncommutativity tensors and the shared
// auxiliary oscillator. l_p is the oscillator ground-state width
// 1/sqrt(m_osc*omega_osc) in hbar = 1 units.
struct TensorConfig {
  double c_theta = 0.0;
  double c_eta = 0.0;
  double l0 = 0.0;
  double p0 = 0.0;
  double m_osc = 1.0;
  double omega_osc = 1.0;

  double l_p() const { return 1.0 / std::sqrt(m_osc * omega_osc); }
};

struct NCTensors {
  Eigen::Matrix3d theta = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d eta = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d gamma = Eigen::Matrix3d::Zero();
};

// M_ij = sum_k eps_ijk v_k, the antisymmetric matrix dual to v.
template <typename S>
Eigen::Matrix<S, 3, 3> levi_civita_contraction(const Vec3T<S>& v) {
  Eigen::Matrix<S, 3, 3> m;
  m(0, 0) = S(0);   m(0, 1) = v[2];   m(0, 2) = -v[1];
  m(1, 0) = -v[2];  m(1, 1) = S(0);   m(1, 2) = v[0];
  m(2, 0) = v[1];   m(2, 1) = -v[0];  m(2, 2) = S(0);
  return m;
}

// Momentum-built tensors: theta from pa, eta from pb; both flip sign under
// time reversal, which is what keeps the algebra T-invariant.
NCTensors tensors_from_state(const TensorConfig& cfg, const ExtendedState& s);

// Earlier position-built variant: theta from a (T-even), eta from pb.
NCTensors tensors_alternative(const TensorConfig& cfg, const ExtendedState& s);

// X = x + (c_theta/2) pa x p,  P = p + (c_eta/2) x x pb.
template <typename S>
std::pair<Vec3T<S>, Vec3T<S>> nc_coordinates(const TensorConfig& cfg,
                                             const ExtendedStateT<S>& s) {
  const Vec3T<S> X = s.x + (cfg.c_theta / 2.0) * s.pa.cross(s.p);
  const Vec3T<S> P = s.p + (cfg.c_eta / 2.0) * s.x.cross(s.pb);
  return {X, P};
}

template <typename S>
ExtendedStateT<Dual<S, 18>> seed_state(const ExtendedStateT<S>& s) {
  ExtendedStateT<Dual<S, 18>> d;
  const Vec3T<S>* in[6] = {&s.x, &s.p, &s.a, &s.pa, &s.b, &s.pb};
  Vec3T<Dual<S, 18>>* out[6] = {&d.x, &d.p, &d.a, &d.pa, &d.b, &d.pb};
  for (int blk = 0; blk < 6; ++blk)
    for (int i = 0; i < 3; ++i) (*out[blk])[i] = Dual<S, 18>::seeded((*in[blk])[i], 3 * blk + i);
  return d;
}

// Canonical Poisson bracket over the nine conjugate pairs.
template <typename F, typename G, typename S>
S bracket_extended(const F& f, const G& g, const ExtendedStateT<S>& s) {
  const auto ds = seed_state(s);
  const Dual<S, 18> fv = f(ds);
  const Dual<S, 18> gv = g(ds);
  S acc = S(0);
  // conjugate pair layout: (x, p) = slots (0..2, 3..5), (a, pa) = (6..8, 9..11),
  // (b, pb) = (12..14, 15..17)
  for (int blk = 0; blk < 3; ++blk) {
    const int q0 = 6 * blk;
    for (int i = 0; i < 3; ++i) {
      const int q = q0 + i;
      const int p = q0 + 3 + i;
      acc += fv.grad[q] * gv.grad[p] - fv.grad[p] * gv.grad[q];
    }
  }
  return acc;
}

// |{A,{B,C}} + {B,{C,A}} + {C,{A,B}}| with exact nested derivatives.
template <typename A, typename B, typename C>
double jacobi_check(const A& fa, const B& fb, const C& fc, const ExtendedState& s) {
  auto bracket_fn = [](const auto& f, const auto& g) {
    return [f, g](const auto& state) { return bracket_extended(f, g, state); };
  };
  const double term1 = bracket_extended(fa, bracket_fn(fb, fc), s);
  const double term2 = bracket_extended(fb, bracket_fn(fc, fa), s);
  const double term3 = bracket_extended(fc, bracket_fn(fa, fb), s);
  return std::abs(term1 + term2 + term3);
}

// Runtime-selectable observable family over the extended space, generic in
// the scalar so it nests under bracket_extended.
struct ExtObservable {
  enum class Kind { NCX, NCP, CanX, CanP, AuxA, AuxPA, AuxB, AuxPB, ThetaEntry, EtaEntry };
  Kind kind = Kind::CanX;
  int i = 0;
  int j = 0;  // second index for tensor entries
  TensorConfig cfg;

  template <typename S>
  S operator()(const ExtendedStateT<S>& s) const {
    switch (kind) {
      case Kind::NCX: return nc_coordinates(cfg, s).first[i];
      case Kind::NCP: return nc_coordinates(cfg, s).second[i];
      case Kind::CanX: return s.x[i];
      case Kind::CanP: return s.p[i];
      case Kind::AuxA: return s.a[i];
      case Kind::AuxPA: return s.pa[i];
      case Kind::AuxB: return s.b[i];
      case Kind::AuxPB: return s.pb[i];
      case Kind::ThetaEntry: return levi_civita_contraction(s.pa)(i, j) * cfg.c_theta;
      case Kind::EtaEntry: return levi_civita_contraction(s.pb)(i, j) * cfg.c_eta;
    }
    return S(0);
  }
};

// Worst-case deviations of the represented brackets from the algebra they
// are supposed to close on.
struct AlgebraResiduals {
  double xx = 0.0;              // {Xi,Xj} vs c_theta*eps_ijk*pa_k
  double pp = 0.0;              // {Pi,Pj} vs c_eta*eps_ijk*pb_k
  double xp = 0.0;              // {Xi,Pj} vs delta_ij + gamma_ij
  double tensor_commute = 0.0;  // {theta_ij, X_k} etc.
  double max() const;
};

AlgebraResiduals verify_algebra(const TensorConfig& cfg, const ExtendedState& s);

// Same proper rotation applied to all six 3-vectors (the classical action
// generated by the total angular momentum).
ExtendedState rotate_extended(const ExtendedState& s, const Eigen::Vector3d& axis,
                              double angle);

// x, a, b fixed; all momenta negated.
ExtendedState time_reverse_extended(const ExtendedState& s);

// Kepler particle term built on (X, P) plus the two oscillator energies.
template <typename S>
S total_hamiltonian(const TensorConfig& cfg, const ExtendedStateT<S>& s, double m,
                    double k) {
  using std::sqrt;
  const auto [X, P] = nc_coordinates(cfg, s);
  const S r2 = X.squaredNorm();
  if (scalar_value(r2) < 1e-24)
    throw Error(errc::origin_singularity, "noncommutative radius vanished");
  const double mw2 = cfg.m_osc * cfg.omega_osc * cfg.omega_osc;
  return P.squaredNorm() / (2.0 * m) - k / sqrt(r2) +
         s.pa.squaredNorm() / (2.0 * cfg.m_osc) + 0.5 * mw2 * s.a.squaredNorm() +
         s.pb.squaredNorm() / (2.0 * cfg.m_osc) + 0.5 * mw2 * s.b.squaredNorm();
}

// Canonical flow of the total Hamiltonian, fixed-step RK4 with the gradient
// taken by forward duals.
ExtendedState advance_extended(const TensorConfig& cfg, const ExtendedState& s0,
                               double m, double k, double dt, std::int64_t n_steps);

// Forward tau, time-reverse, forward tau, time-reverse; distance to the
// start. The T-invariant algebra makes this vanish up to integrator error.
double reversal_experiment_extended(const TensorConfig& cfg, const ExtendedState& s0,
                                    double m, double k, double tau, double dt);

Eigen::Matrix<double, 18, 1> to_vector(const ExtendedState& s);
ExtendedState extended_from_vector(const Eigen::Matrix<double, 18, 1>& v);

}  // namespace ncps
