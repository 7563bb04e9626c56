#include <doctest.h>

#include <cmath>

#include "cscale/error.hpp"
#include "cscale/harmonic.hpp"
#include "helpers.hpp"

using namespace cscale;
using namespace testing;

namespace {

RVec random_real(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

RVec random_orthogonal_apply(const Eigen::MatrixXd& Q, const RVec& v) { return Q * v; }

}  // namespace

TEST_CASE("sphere measures") {
  CHECK(sphere_measure(1) == doctest::Approx(2 * kPi));
  CHECK(sphere_measure(2) == doctest::Approx(4 * kPi));
  CHECK(sphere_measure(3) == doctest::Approx(2 * kPi * kPi));
}

TEST_CASE("disc normalization against the periodic trapezoid rule") {
  for (double r : {0.0, 0.3, 0.7, 0.9}) {
    const int m = 2048;
    double sum = 0.0;
    RVec x(2);
    x << r, 0.0;
    for (int a = 0; a < m; ++a) {
      RVec y(2);
      y << std::cos(2 * kPi * a / m), std::sin(2 * kPi * a / m);
      sum += poisson_ball(x, y);
    }
    const double trapezoid = sum * 2 * kPi / m;
    CHECK(trapezoid == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(poisson_integral(r, 1) == doctest::Approx(trapezoid).epsilon(1e-12));
  }
  for (double r : {0.5, 0.99, 0.999}) {
    CHECK(std::abs(poisson_integral(r, 1) - 1.0) < 1e-10);
    CHECK(std::abs(poisson_integral(r, 2) - 1.0) < 1e-10);
    CHECK(std::abs(poisson_integral(r, 3) - 1.0) < 1e-10);
  }
}

TEST_CASE("Poisson kernel is rotation invariant") {
  std::mt19937 rng(50);
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXd a(3, 3);
    for (int j = 0; j < 3; ++j) a.col(j) = random_real(rng, 3);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
    RVec x = random_real(rng, 3);
    x *= 0.9 / x.norm() * (i + 1) / 21.0;
    RVec y = random_real(rng, 3);
    y /= y.norm();
    CHECK(poisson_ball(random_orthogonal_apply(Q, x), random_orthogonal_apply(Q, y)) ==
          doctest::Approx(poisson_ball(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("bound scan stays in the envelope") {
  const auto s = poisson_bound_scan(1);
  CHECK(s.pass);
  CHECK(s.c1_hat >= 1 / (2 * kPi) - 1e-12);
  CHECK(s.c2_hat <= 1 / kPi + 1e-12);
  for (const auto& r : s.rows) {
    const double d = 1.0 - r.x.norm();
    CHECK(r.ratio == doctest::Approx((1 + r.x.norm()) / (2 * kPi) * (1 - r.x.norm()) / d).epsilon(1e-9));
  }
  CHECK(s.to_csv().rfind("x,y,P,ratio\n", 0) == 0);
}

TEST_CASE("invalid inputs") {
  RVec x(2), y(2);
  x << 1.0, 0.0;
  y << 0.0, 1.0;
  CHECK_THROWS_AS(poisson_ball(x, y), Error);
  x << 0.1, 0.0;
  y << 0.5, 0.0;
  CHECK_THROWS_AS(poisson_ball(x, y), Error);
  CHECK_THROWS_AS(poisson_integral(1.0, 1), Error);
}
