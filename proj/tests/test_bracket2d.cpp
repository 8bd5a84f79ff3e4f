#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ncps/bracket2d.hpp"
#include "ncps/observable.hpp"

using namespace ncps;

namespace {

PhaseState2D random_state(std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng), u(rng)};
}

NCParams2D random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  return {u(rng), u(rng), u(rng)};
}

const auto obs_x1 = [](const auto& s) { return s.x1; };
const auto obs_x2 = [](const auto& s) { return s.x2; };
const auto obs_p1 = [](const auto& s) { return s.p1; };
const auto obs_p2 = [](const auto& s) { return s.p2; };

}  // namespace

TEST_CASE("fundamental brackets reproduce the deformed algebra") {
  const NCParams2D prm{0.3, 0.0, 0.0};
  CHECK(fundamental_bracket(Var2D::X1, Var2D::X2, prm) == 0.3);
  CHECK(fundamental_bracket(Var2D::X1, Var2D::X1, prm) == 0.0);
  CHECK(fundamental_bracket(Var2D::P2, Var2D::P1, {0.0, 0.2, 0.0}) == -0.2);
  CHECK(fundamental_bracket(Var2D::X1, Var2D::P1, {0.0, 0.0, 0.25}) == 1.25);
  CHECK(fundamental_bracket(Var2D::X2, Var2D::P2, {0.0, 0.0, 0.25}) == 1.25);
  CHECK(fundamental_bracket(Var2D::X1, Var2D::P2, {0.1, 0.2, 0.3}) == 0.0);
  CHECK(fundamental_bracket(Var2D::X2, Var2D::P1, {0.1, 0.2, 0.3}) == 0.0);
}

TEST_CASE("fundamental brackets are antisymmetric for every pair") {
  std::mt19937_64 rng(11);
  for (int draw = 0; draw < 50; ++draw) {
    const NCParams2D prm = random_params(rng);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(fundamental_bracket(static_cast<Var2D>(i), static_cast<Var2D>(j), prm) ==
              -fundamental_bracket(static_cast<Var2D>(j), static_cast<Var2D>(i), prm));
  }
}

TEST_CASE("poisson bracket of coordinates recovers the constants") {
  const NCParams2D prm{0.3, 0.0, 0.0};
  std::mt19937_64 rng(21);
  for (int draw = 0; draw < 10; ++draw) {
    const PhaseState2D s = random_state(rng);
    CHECK(poisson_bracket(obs_x1, obs_x2, prm, s) == doctest::Approx(0.3).epsilon(1e-14));
  }
}

TEST_CASE("bracket of an observable with itself vanishes") {
  const NCParams2D prm{0.1, 0.05, 0.02};
  const auto h = [](const auto& s) {
    using std::sqrt;
    return (s.p1 * s.p1 + s.p2 * s.p2) / 2.0 - 1.0 / sqrt(s.x1 * s.x1 + s.x2 * s.x2);
  };
  std::mt19937_64 rng(31);
  for (int draw = 0; draw < 10; ++draw) {
    PhaseState2D s = random_state(rng);
    s.x1 += std::copysign(1.0, s.x1);  // keep away from the origin
    CHECK(poisson_bracket(h, h, prm, s) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("hand-expanded Leibniz value: {X1^2, P1} at (2,0,0,0) with gamma=0.1") {
  const NCParams2D prm{0.0, 0.0, 0.1};
  const PhaseState2D s{2.0, 0.0, 0.0, 0.0};
  const auto x1_sq = [](const auto& st) { return st.x1 * st.x1; };
  // 2*x1*(1+gamma) = 4.4
  CHECK(poisson_bracket(x1_sq, obs_p1, prm, s) == doctest::Approx(4.4).epsilon(1e-14));
}

TEST_CASE("Leibniz rule holds at random states") {
  std::mt19937_64 rng(41);
  const auto f = [](const auto& s) { return s.x1 * s.p2 + s.x2; };
  const auto g = [](const auto& s) { return s.p1 * s.p1 - s.x2 * s.p2; };
  const auto h = [](const auto& s) { using std::sin; return sin(s.x1) + s.p1 * s.x2; };
  const auto fg = [&](const auto& s) { return f(s) * g(s); };

  for (int draw = 0; draw < 100; ++draw) {
    const NCParams2D prm = random_params(rng);
    const PhaseState2D s = random_state(rng);
    const double lhs = poisson_bracket(fg, h, prm, s);
    const double rhs =
        f(s) * poisson_bracket(g, h, prm, s) + g(s) * poisson_bracket(f, h, prm, s);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("Jacobi identity closes for constant deformation") {
  std::mt19937_64 rng(51);
  const auto jacobi = [](const auto& a, const auto& b, const auto& c,
                         const NCParams2D& prm, const PhaseState2D& s) {
    const auto bc = [&](const auto& st) { return poisson_bracket(b, c, prm, st); };
    const auto ca = [&](const auto& st) { return poisson_bracket(c, a, prm, st); };
    const auto ab = [&](const auto& st) { return poisson_bracket(a, b, prm, st); };
    return poisson_bracket(a, bc, prm, s) + poisson_bracket(b, ca, prm, s) +
           poisson_bracket(c, ab, prm, s);
  };

  for (int draw = 0; draw < 50; ++draw) {
    const NCParams2D prm = random_params(rng);
    const PhaseState2D s = random_state(rng);
    // coordinate triples
    CHECK(std::abs(jacobi(obs_x1, obs_x2, obs_p1, prm, s)) < 1e-9);
    CHECK(std::abs(jacobi(obs_x1, obs_p1, obs_p2, prm, s)) < 1e-9);
    CHECK(std::abs(jacobi(obs_x2, obs_p1, obs_p2, prm, s)) < 1e-9);
    // a nonlinear triple
    const auto f = [](const auto& st) { return st.x1 * st.x1; };
    const auto g = [](const auto& st) { return st.p1 * st.x2; };
    const auto h = [](const auto& st) { return st.x1 * st.p2; };
    CHECK(std::abs(jacobi(f, g, h, prm, s)) < 1e-9);
  }
}

TEST_CASE("commutative limit reduces to the canonical bracket") {
  const NCParams2D zero{0.0, 0.0, 0.0};
  const auto f = [](const auto& s) { using std::cos; return cos(s.x1) * s.p2 + s.x2 * s.x2; };
  const auto g = [](const auto& s) { return s.p1 * s.x2 - s.p2 * s.p2; };

  std::mt19937_64 rng(61);
  for (int draw = 0; draw < 50; ++draw) {
    const PhaseState2D s = random_state(rng);
    // canonical bracket via explicit partials
    const auto ds = seed_state(s);
    const auto fv = f(ds);
    const auto gv = g(ds);
    const double canonical = fv.grad[0] * gv.grad[2] - fv.grad[2] * gv.grad[0] +
                             fv.grad[1] * gv.grad[3] - fv.grad[3] * gv.grad[1];
    CHECK(poisson_bracket(f, g, zero, s) == doctest::Approx(canonical).epsilon(1e-12));
  }
}

TEST_CASE("time reversal flips theta and eta, keeps gamma") {
  const NCParams2D prm{0.1, 0.05, 0.02};
  const NCParams2D flipped = time_reverse_params(prm);
  CHECK(flipped.theta == -0.1);
  CHECK(flipped.eta == -0.05);
  CHECK(flipped.gamma == 0.02);

  const NCParams2D zero = time_reverse_params({0.0, 0.0, 0.0});
  CHECK(zero.theta == 0.0);
  CHECK(zero.eta == 0.0);
  CHECK(zero.gamma == 0.0);

  const NCParams2D twice = time_reverse_params(time_reverse_params(prm));
  CHECK(twice.theta == prm.theta);
  CHECK(twice.eta == prm.eta);
  CHECK(twice.gamma == prm.gamma);
}

TEST_CASE("time reversal of a state negates momenta only") {
  const PhaseState2D s{1.0, 2.0, 3.0, 4.0};
  const PhaseState2D r = time_reverse_state(s);
  CHECK(r.x1 == 1.0);
  CHECK(r.x2 == 2.0);
  CHECK(r.p1 == -3.0);
  CHECK(r.p2 == -4.0);

  const PhaseState2D rest{1.0, 2.0, 0.0, 0.0};
  const PhaseState2D rr = time_reverse_state(rest);
  CHECK(rr.p1 == 0.0);
  CHECK(rr.p2 == 0.0);

  std::mt19937_64 rng(71);
  for (int draw = 0; draw < 20; ++draw) {
    const PhaseState2D any = random_state(rng);
    const PhaseState2D twice = time_reverse_state(time_reverse_state(any));
    CHECK(twice.x1 == any.x1);
    CHECK(twice.p1 == any.p1);
    CHECK(twice.p2 == any.p2);
  }
}

TEST_CASE("erased observables: exact and finite-difference gradients") {
  const auto generic = [](const auto& s) {
    using std::sin;
    return s.x1 * s.p1 + sin(s.x2 * s.p2);
  };
  const Observable2D exact = Observable2D::from_function(generic);
  const Observable2D fd = Observable2D::from_value_fn(
      [&](const PhaseState2D& s) { return generic(s); });

  std::mt19937_64 rng(81);
  for (int draw = 0; draw < 30; ++draw) {
    const PhaseState2D s = random_state(rng);
    const Eigen::Vector4d ge = exact.gradient(s);
    const Eigen::Vector4d gf = fd.gradient(s);
    for (int i = 0; i < 4; ++i) {
      const double scale = std::max(1.0, std::abs(ge[i]));
      CHECK(std::abs(ge[i] - gf[i]) / scale < 1e-6);
    }
  }
}

TEST_CASE("erased observables accept analytic gradient callbacks") {
  const Observable2D obs = Observable2D::with_gradient(
      [](const PhaseState2D& s) { return s.x1 * s.x1 + s.p2; },
      [](const PhaseState2D& s) { return Eigen::Vector4d{2.0 * s.x1, 0.0, 0.0, 1.0}; });
  const PhaseState2D s{1.5, 0.0, 0.0, 2.0};
  CHECK(obs(s) == doctest::Approx(4.25));
  CHECK(obs.gradient(s)[0] == 3.0);

  const Observable2D p1 = Observable2D::from_function([](const auto& st) { return st.p1; });
  // {x1^2 + p2, p1} = 2 x1 (1 + gamma)
  CHECK(poisson_bracket(obs, p1, {0.0, 0.0, 0.1}, s) ==
        doctest::Approx(3.3).epsilon(1e-14));
}

TEST_CASE("erased bracket path agrees with the generic path") {
  const NCParams2D prm{0.2, -0.1, 0.05};
  const auto f = [](const auto& s) { return s.x1 * s.x1 * s.p2; };
  const auto g = [](const auto& s) { return s.p1 * s.x2 + s.p2; };
  const Observable2D fe = Observable2D::from_function(f);
  const Observable2D ge = Observable2D::from_function(g);

  std::mt19937_64 rng(91);
  for (int draw = 0; draw < 20; ++draw) {
    const PhaseState2D s = random_state(rng);
    CHECK(poisson_bracket(fe, ge, prm, s) ==
          doctest::Approx(poisson_bracket(f, g, prm, s)).epsilon(1e-12));
  }
}
