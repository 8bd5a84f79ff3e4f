#pragma once

#include "ncps/bracket2d.hpp"
#include "ncps/errors.hpp"

namespace ncps {

// Parameters of the linear map from canonical (x, p) to noncommutative
// (X, P) variables: X1 = eps*(x1 - theta1p*p2), X2 = eps*(x2 + theta2p*p1),
// P1 = eps*(p1 + eta1p*x2), P2 = eps*(p2 - eta2p*x1).
struct RepParams {
  double eps = 1.0;
  double theta1p = 0.0;
  double theta2p = 0.0;
  double eta1p = 0.0;
  double eta2p = 0.0;
};

template <typename S>
struct CanonicalState2DT {
  S x1, x2, p1, p2;
};
using CanonicalState2D = CanonicalState2DT<double>;

// Bracket constants induced by a representation. A valid set for the 2D
// algebra needs the two diagonal gamma entries to coincide.
struct InducedAlgebra {
  double theta = 0.0;
  double eta = 0.0;
  double gamma11 = 0.0;
  double gamma22 = 0.0;
};

enum class Branch { Plus, Minus };

template <typename S>
PhaseState2DT<S> rep_map(const RepParams& rp, const CanonicalState2DT<S>& c) {
  return {rp.eps * (c.x1 - rp.theta1p * c.p2), rp.eps * (c.x2 + rp.theta2p * c.p1),
          rp.eps * (c.p1 + rp.eta1p * c.x2), rp.eps * (c.p2 - rp.eta2p * c.x1)};
}

// rep_map after the canonical time reversal x -> x, p -> -p.
template <typename S>
PhaseState2DT<S> time_reversed_images(const RepParams& rp,
                                      const CanonicalState2DT<S>& c) {
  return rep_map(rp, CanonicalState2DT<S>{c.x1, c.x2, -c.p1, -c.p2});
}

InducedAlgebra induced_algebra(const RepParams& rp);

// Two-branch closed-form solution of the matching equations for
// (theta, eta, gamma) with eps = 1. Requires theta*eta > 0 and
// gamma <= theta*eta/4.
RepParams solve_general(double theta, double eta, double gamma, Branch branch);

// gamma = 0 family with theta2p chosen freely; closed form when theta2p = 0,
// otherwise a scalar root solve on the reduced matching equation.
RepParams solve_gamma_zero(double theta, double eta, double theta2p_choice);

// The two symmetric gamma = 0 representations
// theta' = (1 +/- sqrt(1 - theta*eta))/eta, eta' = (1 +/- sqrt(1 - theta*eta))/theta,
// eps = (1 + theta'*eta')^(-1/2). Requires theta*eta <= 1.
RepParams symmetric_reps_gamma_zero(double theta, double eta, Branch branch);

}  // namespace ncps
