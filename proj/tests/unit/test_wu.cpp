#include <doctest.h>

#include <cmath>

#include "cscale/geometry.hpp"
#include "cscale/invmetrics.hpp"
#include "cscale/wu.hpp"
#include "helpers.hpp"

using namespace cscale;
using namespace testing;

namespace {

/// Hermitian form of the ball metric at q: F(q, v)^2 = v^H G v.
CMat ball_form(const CVec& q) {
  const double s = 1.0 - q.squaredNorm();
  return CMat::Identity(q.size(), q.size()) / s + q * q.adjoint() / (s * s);
}

double max_constraint(const CMat& H, const std::vector<CVec>& pts) {
  double m = 0.0;
  for (const auto& v : pts) m = std::max(m, v.dot(H * v).real());
  return m;
}

}  // namespace

TEST_CASE("indicatrix samples satisfy F = 1") {
  auto ball = make_catalog_domain("ball");
  const CVec q = make_point({0.3, -0.2});
  const auto s = indicatrix_sample(ball, q, 12);
  for (const auto& v : s.points) CHECK(ball_metric(q, v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Wu metric of the ball is the ball metric form") {
  auto ball = make_catalog_domain("ball");
  for (const CVec& q : {CVec(CVec::Zero(2)), make_point({0.5, 0.0}), make_point({0.2, cd(0.0, 0.3)})}) {
    const auto e = wu_metric(ball, q, 16, 1e-10, false);
    CHECK((e.H - ball_form(q)).norm() < 1e-6 * ball_form(q).norm());
    CHECK(e.max_constraint <= 1.0 + 1e-8);
  }
}

TEST_CASE("MVEE transforms covariantly under unitary maps") {
  std::mt19937 rng(40);
  auto bidisc = make_catalog_domain("bidisc");
  const auto s = indicatrix_sample(bidisc, make_point({0.1, 0.2}), 16);
  const auto e = mvee_hermitian(s.points, 1e-10);
  for (int i = 0; i < 3; ++i) {
    const CMat U = random_unitary(rng, 2);
    std::vector<CVec> rotated;
    for (const auto& v : s.points) rotated.push_back(U * v);
    const auto r = mvee_hermitian(rotated, 1e-10);
    CHECK((r.H - U * e.H * U.adjoint()).norm() < 1e-6 * e.H.norm());
    CHECK(std::abs(r.det - e.det) < 1e-6 * e.det);
  }
}

TEST_CASE("ellipsoid contains every sample and is tight") {
  std::mt19937 rng(41);
  std::vector<CVec> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(random_vector(rng, 3));
  const auto e = mvee_hermitian(pts, 1e-9);
  CHECK(max_constraint(e.H, pts) <= 1.0 + 1e-8);
  CHECK(max_constraint(e.H, pts) >= 1.0 - 1e-8);
  CHECK(e.H.isApprox(e.H.adjoint(), 1e-12));
  CHECK(e.gap <= 1e-9);
}

TEST_CASE("bidisc at the origin") {
  auto bidisc = make_catalog_domain("bidisc");
  const auto e = wu_metric(bidisc, CVec::Zero(2), 32, 1e-9, false);
  CHECK((e.H - 0.5 * CMat::Identity(2, 2)).norm() < 1e-4);
}
