#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

#include "ncps/dual.hpp"

using ncps::Dual;

namespace {

// f(x, y, z) = x^2 y + sin(z) / x
template <typename S>
S test_fn(const S& x, const S& y, const S& z) {
  using std::sin;
  return x * x * y + sin(z) / x;
}

}  // namespace

TEST_CASE("dual gradients match analytic derivatives") {
  using D = Dual<double, 3>;
  const double x = 1.3, y = -0.7, z = 2.1;
  const D r = test_fn(D::seeded(x, 0), D::seeded(y, 1), D::seeded(z, 2));

  CHECK(r.value == doctest::Approx(x * x * y + std::sin(z) / x).epsilon(1e-14));
  CHECK(r.grad[0] ==
        doctest::Approx(2.0 * x * y - std::sin(z) / (x * x)).epsilon(1e-14));
  CHECK(r.grad[1] == doctest::Approx(x * x).epsilon(1e-14));
  CHECK(r.grad[2] == doctest::Approx(std::cos(z) / x).epsilon(1e-14));
}

TEST_CASE("dual gradients agree with central finite differences") {
  using D = Dual<double, 3>;
  const double x = 0.9, y = 1.7, z = -0.4, h = 1e-6;
  const D r = test_fn(D::seeded(x, 0), D::seeded(y, 1), D::seeded(z, 2));

  const double fd_x = (test_fn(x + h, y, z) - test_fn(x - h, y, z)) / (2 * h);
  const double fd_y = (test_fn(x, y + h, z) - test_fn(x, y - h, z)) / (2 * h);
  const double fd_z = (test_fn(x, y, z + h) - test_fn(x, y, z - h)) / (2 * h);
  CHECK(r.grad[0] == doctest::Approx(fd_x).epsilon(1e-6));
  CHECK(r.grad[1] == doctest::Approx(fd_y).epsilon(1e-6));
  CHECK(r.grad[2] == doctest::Approx(fd_z).epsilon(1e-6));
}

TEST_CASE("nested duals carry exact second derivatives") {
  using Inner = Dual<double, 2>;
  using Outer = Dual<Inner, 2>;

  // g(x, y) = x^3 y^2
  const double x = 1.2, y = 0.8;
  Outer ox(Inner::seeded(x, 0));
  ox.grad[0] = Inner(1.0);
  Outer oy(Inner::seeded(y, 1));
  oy.grad[1] = Inner(1.0);

  const Outer g = ox * ox * ox * oy * oy;
  // d2g/dx2 = 6 x y^2, d2g/dxdy = 6 x^2 y, d2g/dy2 = 2 x^3
  CHECK(g.grad[0].grad[0] == doctest::Approx(6.0 * x * y * y).epsilon(1e-14));
  CHECK(g.grad[0].grad[1] == doctest::Approx(6.0 * x * x * y).epsilon(1e-14));
  CHECK(g.grad[1].grad[1] == doctest::Approx(2.0 * x * x * x).epsilon(1e-14));
}

TEST_CASE("eigen vectors of duals support cross, dot and norm") {
  using D = Dual<double, 6>;
  Eigen::Matrix<D, 3, 1> u, v;
  const double uv[6] = {0.3, -1.1, 0.7, 0.9, 0.4, -0.2};
  for (int i = 0; i < 3; ++i) {
    u[i] = D::seeded(uv[i], i);
    v[i] = D::seeded(uv[3 + i], 3 + i);
  }

  const Eigen::Matrix<D, 3, 1> w = u.cross(v);
  CHECK(w[0].value == doctest::Approx(uv[1] * uv[5] - uv[2] * uv[4]));
  // d(w_0)/d(u_1) = v_2
  CHECK(w[0].grad[1] == doctest::Approx(uv[5]));
  CHECK(w[0].grad[5] == doctest::Approx(uv[1]));

  const D dot = u.dot(v);
  CHECK(dot.value ==
        doctest::Approx(uv[0] * uv[3] + uv[1] * uv[4] + uv[2] * uv[5]));
  CHECK(dot.grad[0] == doctest::Approx(uv[3]));

  const D n = u.norm();
  const double norm_u = std::sqrt(uv[0] * uv[0] + uv[1] * uv[1] + uv[2] * uv[2]);
  CHECK(n.value == doctest::Approx(norm_u));
  CHECK(n.grad[0] == doctest::Approx(uv[0] / norm_u));

  // scalar mixing with plain doubles
  const Eigen::Matrix<D, 3, 1> scaled = 0.5 * u + v * 2.0;
  CHECK(scaled[1].value == doctest::Approx(0.5 * uv[1] + 2.0 * uv[4]));
}
