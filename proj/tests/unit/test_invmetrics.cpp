#include <doctest.h>

#include <cmath>

#include "cscale/error.hpp"
#include "cscale/geometry.hpp"
#include "cscale/invmetrics.hpp"
#include "cscale/scaling.hpp"
#include "helpers.hpp"

using namespace cscale;
using namespace testing;

namespace {

/// Infinitesimal Kobayashi metric of the unit ball, written out independently.
double ball_oracle(const CVec& q, const CVec& xi) {
  const double s = 1.0 - q.squaredNorm();
  return std::sqrt(xi.squaredNorm() / s + std::norm(q.dot(xi)) / (s * s));
}

}  // namespace

TEST_CASE("closed forms against the oracle") {
  std::mt19937 rng(20);
  for (int i = 0; i < 50; ++i) {
    const CVec q = random_in_ball(rng, 3, 0.95);
    const CVec xi = random_vector(rng, 3);
    CHECK(ball_metric(q, xi) == doctest::Approx(ball_oracle(q, xi)).epsilon(1e-12));
  }
  const double r = 0.6;
  CHECK(ball_metric(make_point({0.0, 0.0}), make_point({1.0, 0.0})) == doctest::Approx(1.0));
  CHECK(ball_metric(make_point({r, 0.0}), make_point({1.0, 0.0})) == doctest::Approx(1.0 / (1 - r * r)));
  CHECK(ball_metric(make_point({r, 0.0}), make_point({0.0, 1.0})) == doctest::Approx(1.0 / std::sqrt(1 - r * r)));
  CHECK(polydisc_metric(make_point({r, 0.0}), make_point({1.0, 0.0})) == doctest::Approx(1.0 / (1 - r * r)));
}

TEST_CASE("Moebius invariance of the ball metric") {
  std::mt19937 rng(21);
  for (int i = 0; i < 20; ++i) {
    const CVec a = random_in_ball(rng, 2, 0.9);
    const CVec q = random_in_ball(rng, 2, 0.9);
    const CVec xi = random_vector(rng, 2);
    const auto phi = ball_automorphism(a);
    const double lhs = ball_metric(phi(q), phi.jacobian(q) * xi);
    CHECK(std::abs(lhs - ball_metric(q, xi)) <= 1e-8 * ball_metric(q, xi));
  }
}

TEST_CASE("Siegel metric is the Cayley pullback of the ball metric") {
  std::mt19937 rng(22);
  const auto c = cayley_siegel_to_ball(2);
  for (int i = 0; i < 20; ++i) {
    CVec w = random_vector(rng, 2, 0.5);
    w[0] = cd(std::norm(w[1]) + 0.1 + std::abs(w[0].real()), w[0].imag());
    const CVec xi = random_vector(rng, 2);
    CHECK(siegel_metric(w, xi) == doctest::Approx(ball_oracle(c(w), c.jacobian(w) * xi)).epsilon(1e-10));
  }
}

TEST_CASE("metric homogeneity") {
  std::mt19937 rng(23);
  auto egg = make_catalog_domain("egg", {.dim = 2, .k = 2});
  for (int i = 0; i < 10; ++i) {
    const CVec q = random_in_ball(rng, 2, 0.6);
    const CVec xi = random_vector(rng, 2);
    const cd c = random_vector(rng, 1)[0];
    const auto a = kobayashi_sandwich(egg, q, xi);
    const auto b = kobayashi_sandwich(egg, q, CVec(c * xi));
    CHECK(b.upper == doctest::Approx(std::abs(c) * a.upper).epsilon(1e-6));
    CHECK(b.lower == doctest::Approx(std::abs(c) * a.lower).epsilon(1e-6));
    CHECK(ball_metric(q, CVec(c * xi)) == doctest::Approx(std::abs(c) * ball_metric(q, xi)).epsilon(1e-12));
  }
}

TEST_CASE("inclusion monotonicity") {
  std::mt19937 rng(24);
  auto egg = make_catalog_domain("egg", {.dim = 2, .k = 2});
  auto bidisc = make_catalog_domain("bidisc");
  for (int i = 0; i < 20; ++i) {
    const CVec q = random_in_ball(rng, 2, 0.7);
    const CVec xi = random_vector(rng, 2);
    const double f_ball = ball_metric(q, xi);
    // ball inside egg(2) and inside the bidisc; ball of radius 2 contains the unit ball
    CHECK(kobayashi_sandwich(egg, q, xi).lower <= f_ball * (1 + 1e-12));
    CHECK(kobayashi_metric(bidisc, q, xi).value <= f_ball * (1 + 1e-12));
    CHECK(ball_metric(q, xi, 2.0) <= f_ball);
  }
}

TEST_CASE("sandwich brackets the closed forms") {
  std::mt19937 rng(25);
  auto ball = make_catalog_domain("ball");
  for (int i = 0; i < 10; ++i) {
    const CVec q = random_in_ball(rng, 2, 0.8);
    const CVec xi = random_vector(rng, 2);
    const auto s = kobayashi_sandwich(ball, q, xi);
    const double exact = ball_metric(q, xi);
    CHECK(s.lower <= exact * (1 + 1e-10));
    CHECK(s.upper >= exact * (1 - 1e-10));
    CHECK(s.lower <= s.upper);
  }
  auto bidisc = make_catalog_domain("bidisc");
  const auto b = kobayashi_sandwich(bidisc, CVec::Zero(2), make_point({1.0, 0.0}));
  CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Richardson extrapolation is exact on polynomials in t") {
  const std::vector<double> t = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> v;
  for (double x : t) v.push_back(3.0 - 2.0 * x + 5.0 * x * x);
  CHECK(richardson_limit(t, v) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Lee ratio rows match closed forms") {
  auto ball = make_catalog_domain("ball");
  for (double r : {0.3, 0.9, 0.999}) {
    const CVec q = make_point({r, 0.0});
    CHECK(lee_row(ball, q, make_point({1.0, 0.0})).lee_ratio == doctest::Approx((1 + r) * (1 + r) / 4).epsilon(1e-10));
    CHECK(lee_row(ball, q, make_point({0.0, 1.0})).lee_ratio == doctest::Approx((1 + r) / 2).epsilon(1e-10));
  }
  CHECK_THROWS_AS(nearest_boundary_point(ball, CVec::Zero(2)), Error);
}

TEST_CASE("Graham harness rejects an empty list") {
  auto ball = make_catalog_domain("ball");
  CHECK_THROWS_AS(graham_asymptotics(ball, make_point({1.0, 0.0}), make_point({1.0, 0.0}), {}), Error);
}
