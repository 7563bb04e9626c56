#include <doctest.h>

#include <cmath>

#include "cscale/error.hpp"
#include "cscale/geometry.hpp"
#include "cscale/scaling.hpp"
#include "helpers.hpp"

using namespace cscale;
using namespace testing;

TEST_CASE("unitary_to_e0 is unitary and sends v to e0") {
  std::mt19937 rng(10);
  for (int d = 1; d <= 4; ++d) {
    for (int i = 0; i < 10; ++i) {
      const CVec v = random_unit(rng, d);
      const CMat R = unitary_to_e0(v);
      CHECK((R.adjoint() * R - CMat::Identity(d, d)).norm() < 1e-13);
      CVec e0 = CVec::Zero(d);
      e0[0] = 1.0;
      CHECK((R * v - e0).norm() < 1e-13);
    }
  }
}

TEST_CASE("centering and dilatation normalize the orbit point") {
  std::mt19937 rng(11);
  auto ball = make_catalog_domain("ball");
  for (int i = 0; i < 10; ++i) {
    const CVec q = random_in_ball(rng, 2, 0.95);
    const auto c = centering_map(ball, q);
    CHECK(std::abs(ball(c.boundary_point)) < 1e-10);
    CHECK(c.map(c.boundary_point).norm() < 1e-12);
    const auto dil = pinchuk_dilatation(ball, q);
    CHECK((dil.map(q) - make_point({1.0, 0.0})).norm() < 1e-10);
  }
}

TEST_CASE("ball automorphisms preserve the ball") {
  std::mt19937 rng(12);
  for (int i = 0; i < 20; ++i) {
    const CVec a = random_in_ball(rng, 2, 0.9);
    const auto phi = ball_automorphism(a);
    CHECK(phi(CVec::Zero(2)).isApprox(a, 1e-13));
    CHECK(phi(a).norm() < 1e-13);
    const CVec z = random_in_ball(rng, 2, 0.99);
    CHECK(phi(z).norm() < 1.0);
    CHECK((phi(phi(z)) - z).norm() < 1e-12);
    const CVec u = random_unit(rng, 2);
    CHECK(std::abs(phi(u).norm() - 1.0) < 1e-12);
    CHECK((phi.jacobian(z) - finite_difference_jacobian(phi, z)).norm() < 1e-7);
  }
}

TEST_CASE("Cayley transform maps the Siegel domain onto the ball") {
  std::mt19937 rng(13);
  auto siegel = make_catalog_domain("siegel");
  const auto c = cayley_siegel_to_ball(2);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    CVec w = random_vector(rng, 2);
    w[0] = cd(std::norm(w[1]) + u(rng) - 1.5, w[0].imag());
    const CVec b = c(w);
    CHECK((siegel(w) < 0) == (b.norm() < 1.0));
    if (siegel(w) < 0) CHECK((c.apply_inverse(b) - w).norm() < 1e-10 * (1 + w.norm()));
  }
  CHECK_THROWS_AS(c(make_point({-1.0, 0.0})), Error);
}

TEST_CASE("Bedford-Pinchuk automorphisms preserve the model") {
  std::mt19937 rng(14);
  auto model = make_catalog_domain("bp_model", {.dim = 2, .m = 2});
  const auto phi = bp_model_automorphisms(2, 0.7, 3.0);
  for (int i = 0; i < 50; ++i) {
    const CVec z = random_vector(rng, 2);
    CHECK((model(z) < 0) == (model(phi(z)) < 0));
  }
}

TEST_CASE("Siegel domain is a fixed point of its own scaling") {
  OrbitSpec o;
  o.domain = "siegel";
  o.family = "bp_dilation";
  o.base_point = make_point({1.0, 0.0});
  o.accumulation_point = CVec::Zero(2);
  const auto steps = pinchuk_scaling_sequence(o, 6);
  auto siegel = make_catalog_domain("siegel");
  NormalConvergenceOptions opt;
  opt.compact = interior_samples(siegel, make_point({1.0, 0.0}), 0.9, 100, 0.05, 3);
  opt.box_count = 500;
  std::vector<AffineMap> maps;
  std::vector<int> idx;
  for (const auto& s : steps) {
    maps.push_back(s.dilatation.map);
    idx.push_back(s.index);
  }
  const auto rep = normal_convergence_check(maps, idx, siegel, siegel, opt);
  for (const auto& r : rep.rows) {
    CHECK(r.deviation_a < 1e-12);
    CHECK(r.deviation_b < 1e-12);
  }
}

TEST_CASE("orbit validation rejects bad specs") {
  KeyValueConfig cfg;
  cfg.set("family", "spiral");
  CHECK_THROWS_WITH_AS(OrbitSpec::from_config(cfg), doctest::Contains("family"), Error);
  OrbitSpec o;
  o.base_point = make_point({2.0, 0.0});
  o.accumulation_point = make_point({1.0, 0.0});
  o.family = "identity";
  CHECK_THROWS_AS(o.validate(3), Error);
}

TEST_CASE("affine fit recovers an affine map") {
  std::mt19937 rng(15);
  CMat M(2, 2);
  M.col(0) = random_vector(rng, 2);
  M.col(1) = random_vector(rng, 2);
  const AffineMap A(M, random_vector(rng, 2));
  std::vector<CVec> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(random_vector(rng, 2));
    y.push_back(A(x.back()));
  }
  const auto fit = fit_affine(x, y);
  CHECK(fit.residual < 1e-12);
  CHECK((fit.map.matrix() - M).norm() < 1e-12);
  CHECK_THROWS_AS(fit_affine({x[0], x[0], x[0]}, {y[0], y[0], y[0]}), Error);
}

TEST_CASE("distance to a ball") {
  std::mt19937 rng(16);
  auto ball = make_catalog_domain("ball");
  for (int i = 0; i < 20; ++i) {
    const CVec x = random_vector(rng, 2);
    CHECK(distance_to_domain(ball, x) == doctest::Approx(std::max(0.0, x.norm() - 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("kernel estimate is monotone in the horizon") {
  GridSpec g;
  g.center = CVec::Zero(1);
  g.spacing = 0.05;
  const auto seq = ball_sequence([](int nu) { return 1.0 + 1.0 / nu; }, "grow");
  std::size_t previous = SIZE_MAX;
  for (int horizon : {10, 20, 50, 100}) {
    const auto k = caratheodory_kernel_estimate(seq, CVec::Zero(1), g, horizon, 5);
    CHECK(k.marked_count() <= previous);
    previous = k.marked_count();
  }
  CHECK_THROWS_AS(caratheodory_kernel_estimate(seq, CVec::Zero(1), g, 3, 5), Error);
}

TEST_CASE("shrinking balls give the degenerate kernel") {
  GridSpec g;
  g.center = CVec::Zero(1);
  g.spacing = 0.1;
  const auto k = caratheodory_kernel_estimate(ball_sequence([](int nu) { return 1.0 / nu; }, "shrink"),
                                              CVec::Zero(1), g);
  CHECK(k.degenerate);
}

TEST_CASE("Frankel and Pinchuk scalings differ by an affine map") {
  OrbitSpec o;
  o.base_point = CVec::Zero(2);
  o.accumulation_point = make_point({1.0, 0.0});
  auto ball = make_catalog_domain("ball");
  const auto rep = frankel_pinchuk_compare(o, {2, 6}, interior_samples(ball, CVec::Zero(2), 0.5, 30, 0.3, 5));
  for (const auto& r : rep.rows) CHECK(r.deviation_a < 1e-8);
}
