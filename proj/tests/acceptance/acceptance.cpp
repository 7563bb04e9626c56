#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "cscale/bergman.hpp"
#include "cscale/geometry.hpp"
#include "cscale/harmonic.hpp"
#include "cscale/invmetrics.hpp"
#include "cscale/quadrature.hpp"
#include "cscale/scaling.hpp"
#include "cscale/wu.hpp"

using namespace cscale;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-22s %s (%.2f s, budget %.0f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
              budget_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CVec random_unit(std::mt19937& rng, int dim) {
  std::normal_distribution<double> n;
  CVec v(dim);
  for (int j = 0; j < dim; ++j) v[j] = cd(n(rng), n(rng));
  return v / v.norm();
}

CVec random_in_ball(std::mt19937& rng, int dim, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return random_unit(rng, dim) * r * std::pow(u(rng), 1.0 / (2 * dim));
}

BergmanDomain bdomain(const std::string& tag, int dim, int k = 2) {
  BergmanDomain b;
  b.tag = tag;
  b.dim = dim;
  b.k = k;
  return b;
}

double ball_oracle(const CVec& q, const CVec& xi) {
  const double s = 1.0 - q.squaredNorm();
  return std::sqrt(xi.squaredNorm() / s + std::norm(q.dot(xi)) / (s * s));
}

// 1
Outcome klembeck() {
  std::mt19937 rng(101);
  const auto ball = monomial_norms(bdomain("ball", 2), 48);
  const auto disc = monomial_norms(bdomain("disc", 1), 48);
  double ball_err = 0.0, disc_err = 0.0;
  for (double r : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}) {
    for (int i = 0; i < 4; ++i) {
      const CVec q = random_unit(rng, 2) * r;
      const CVec xi = random_unit(rng, 2);
      ball_err = std::max(ball_err, std::abs(sectional_curvature(ball, q, xi).curvature + 4.0 / 3.0));
      const CVec qd = random_unit(rng, 1) * r;
      disc_err = std::max(disc_err, std::abs(sectional_curvature(disc, qd, make_point({1.0})).curvature + 2.0));
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto egg = klembeck_harness(bdomain("egg", 2, 2), make_point({0.0, 1.0}), {0.5, 0.4, 0.3, 0.2},
                                    make_point({1.0, 0.0}), 48, 5e-2);
  const double egg_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = ball_err <= 1e-4 && disc_err <= 1e-6 && std::abs(egg.fitted_limit + 4.0 / 3.0) <= 5e-2 && egg_s < 60;
  return {pass, fmt("ball max|S+4/3|=%.2e (tol 1e-4)", ball_err) + fmt(", disc max|S+2|=%.2e (tol 1e-6)", disc_err) +
                    fmt(", egg(2) fit=%.4f", egg.fitted_limit) + fmt(" vs -4/3 (tol 5e-2, %.1f s)", egg_s)};
}

// 2
Outcome graham() {
  auto ball = make_catalog_domain("ball");
  const auto ts = dyadic_list(1, 10);
  const auto n = graham_asymptotics(ball, make_point({1.0, 0.0}), make_point({1.0, 0.0}), ts, 1e-3);
  const auto t = graham_asymptotics(ball, make_point({1.0, 0.0}), make_point({0.0, 1.0}), ts, 1e-3);
  const bool pass = std::abs(n.fitted_limit - 0.5) <= 1e-3 && std::abs(t.fitted_limit - 1.0 / std::sqrt(2.0)) <= 1e-3;
  return {pass, fmt("normal dF->%.6f vs 0.5", n.fitted_limit) +
                    fmt(", tangential sqrt(d)F->%.6f vs 0.70711 (tol 1e-3)", t.fitted_limit)};
}

// 3
Outcome lee() {
  auto ball = make_catalog_domain("ball");
  const CVec q = make_point({1.0 - 1e-3, 0.0});
  double worst = 0.0;
  for (const CVec& xi : {make_point({1.0, 0.0}), make_point({0.0, 1.0}), make_point({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)})}) {
    worst = std::max(worst, std::abs(lee_row(ball, q, xi).lee_ratio - 1.0));
  }
  double closed = 0.0;
  for (double r : {0.1, 0.5, 0.9, 0.99}) {
    const CVec qr = make_point({r, 0.0});
    closed = std::max(closed, std::abs(lee_row(ball, qr, make_point({1.0, 0.0})).lee_ratio - (1 + r) * (1 + r) / 4));
    closed = std::max(closed, std::abs(lee_row(ball, qr, make_point({0.0, 1.0})).lee_ratio - (1 + r) / 2));
  }
  return {worst <= 2e-2 && closed <= 1e-10,
          fmt("max|ratio-1| at d=1e-3: %.2e (tol 2e-2)", worst) + fmt(", closed-form rows err %.1e (tol 1e-10)", closed)};
}

// 4
Outcome finite_type() {
  std::string detail = "egg(k) types:";
  bool pass = true;
  for (int k = 1; k <= 4; ++k) {
    const auto r = order_of_contact(make_catalog_domain("egg", {.dim = 2, .k = k}), make_point({1.0, 0.0}));
    const int got = r.finite_type ? *r.finite_type : -1;
    pass = pass && got == 2 * k;
    detail += " " + std::to_string(got);
  }
  const auto b = order_of_contact(make_catalog_domain("ball"), make_point({1.0, 0.0}));
  pass = pass && b.finite_type && *b.finite_type == 2;
  const auto h = order_of_contact(make_catalog_domain("halfspace"), CVec::Zero(2));
  pass = pass && !h.finite_type;
  detail += ", ball " + (b.finite_type ? std::to_string(*b.finite_type) : std::string("none"));
  detail += ", halfspace " + std::string(h.finite_type ? std::to_string(*h.finite_type) : "exceeds search bound");
  return {pass, detail};
}

// 5
Outcome scaling() {
  auto ball = make_catalog_domain("ball");
  auto siegel = make_catalog_domain("siegel");
  NormalConvergenceOptions opt;
  opt.compact = interior_samples(siegel, make_point({1.0, 0.0}), 0.9, 200, 0.05, 3);
  OrbitSpec o;
  o.base_point = CVec::Zero(2);
  o.accumulation_point = make_point({1.0, 0.0});
  std::vector<AffineMap> maps;
  std::vector<int> idx;
  for (const auto& s : pinchuk_scaling_sequence(o, 12)) {
    maps.push_back(s.dilatation.map);
    idx.push_back(s.index);
  }
  const auto rep = normal_convergence_check(maps, idx, ball, siegel, opt);
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double prev = std::max(rep.rows[i - 1].deviation_a, rep.rows[i - 1].deviation_b);
    const double cur = std::max(rep.rows[i].deviation_a, rep.rows[i].deviation_b);
    decreasing = decreasing && cur < prev;
  }
  const double last = std::max(rep.rows.back().deviation_a, rep.rows.back().deviation_b);

  OrbitSpec so;
  so.domain = "siegel";
  so.family = "bp_dilation";
  so.base_point = make_point({1.0, 0.0});
  so.accumulation_point = CVec::Zero(2);
  maps.clear();
  for (const auto& s : pinchuk_scaling_sequence(so, 12)) maps.push_back(s.dilatation.map);
  const auto fixed = normal_convergence_check(maps, idx, siegel, siegel, opt);
  double fixed_dev = 0.0;
  for (const auto& r : fixed.rows) fixed_dev = std::max({fixed_dev, r.deviation_a, r.deviation_b});
  return {decreasing && last < 1e-2 && fixed_dev <= 1e-12,
          std::string("ball->Siegel deviations ") + (decreasing ? "decreasing" : "NOT decreasing") +
              fmt(", nu=12: %.2e (tol 1e-2)", last) + fmt(", Siegel fixed point %.1e (tol 1e-12)", fixed_dev)};
}

// 6
Outcome frankel() {
  auto ball = make_catalog_domain("ball");
  OrbitSpec o;
  o.base_point = CVec::Zero(2);
  o.accumulation_point = make_point({1.0, 0.0});
  const auto compact = interior_samples(ball, CVec::Zero(2), 0.5, 50, 0.3, 5);
  const auto rep = frankel_pinchuk_compare(o, {10}, compact, 1e-3);
  const double res = rep.rows.back().deviation_a;
  return {compact.size() == 50 && res < 1e-3,
          fmt("affine-fit residual at nu=10: %.2e (tol 1e-3)", res) + fmt(" over %.0f samples", compact.size())};
}

// 7
Outcome kernel() {
  const int horizon = 200, window = 5;
  GridSpec g;
  g.center = CVec::Zero(1);
  g.spacing = 0.02;
  const auto grow =
      caratheodory_kernel_estimate(ball_sequence([](int nu) { return 1.0 + 1.0 / nu; }, "grow"), CVec::Zero(1), g,
                                   horizon, window);
  std::size_t mismatch = 0, inner_missing = 0, shell = 0;
  for (std::size_t i = 0; i < grow.size(); ++i) {
    const double r = grow.grid_point(i).norm();
    // a point survives the window [N-W+1, N] exactly when |x| < 1 + 1/N
    const bool expected = r < 1.0 + 1.0 / horizon;
    if (static_cast<bool>(grow.marked[i]) != expected) ++mismatch;
    if (r < 1.0 && !grow.marked[i]) ++inner_missing;
    if (r >= 1.0 && grow.marked[i]) ++shell;
  }
  const auto shrink =
      caratheodory_kernel_estimate(ball_sequence([](int nu) { return 1.0 / nu; }, "shrink"), CVec::Zero(1), g,
                                   horizon, window);
  const bool pass = mismatch == 0 && inner_missing == 0 && grow.marked_count() > 0 && shrink.degenerate &&
                    shrink.marked_count() == 1;
  return {pass, fmt("grow: %.0f mismatches vs finite-horizon oracle", mismatch) +
                    fmt(", %.0f unit-ball points unmarked", inner_missing) +
                    fmt(", %.0f points in 1<=|x|<1+1/N", shell) +
                    std::string(", shrink: ") + (shrink.degenerate ? "{0}" : "non-degenerate")};
}

// 8
Outcome bergman() {
  const auto disc = monomial_norms(bdomain("disc", 1), 32);
  const auto ball = monomial_norms(bdomain("ball", 2), 32);
  const double e_disc = std::abs(bergman_kernel(disc, CVec::Zero(1), CVec::Zero(1)) - 1.0 / kPi);
  const double e_ball = std::abs(bergman_kernel(ball, CVec::Zero(2), CVec::Zero(2)) - 2.0 / (kPi * kPi));
  std::mt19937 rng(108);
  bool hermitian = true;
  const auto egg = monomial_norms(bdomain("egg", 2, 2), 24);
  for (int i = 0; i < 50; ++i) {
    const CVec z = random_in_ball(rng, 2, 0.5), w = random_in_ball(rng, 2, 0.5);
    hermitian = hermitian && bergman_kernel(egg, z, w) == std::conj(bergman_kernel(egg, w, z)) &&
                bergman_kernel(ball, z, w) == std::conj(bergman_kernel(ball, w, z));
  }
  // <f, K(., w)> by polar quadrature for f = 1 + 2z + z^3 in the truncated space
  const auto small = monomial_norms(bdomain("disc", 1), 16);
  auto f = [](cd z) { return 1.0 + 2.0 * z + z * z * z; };
  double repro = 0.0;
  for (const cd w : {cd(0.3, -0.2), cd(-0.6, 0.1), cd(0.0, 0.8)}) {
    auto part = [&](double r, bool im) {
      cd sum = 0.0;
      const int m = 64;
      for (int a = 0; a < m; ++a) {
        CVec zv(1), wv(1);
        zv[0] = std::polar(r, 2 * kPi * a / m);
        wv[0] = w;
        sum += f(zv[0]) * std::conj(bergman_kernel(small, zv, wv, 1.0));
      }
      sum *= 2 * kPi / m * r;
      return im ? sum.imag() : sum.real();
    };
    const cd ip(gauss_panels([&](double r) { return part(r, false); }, 0.0, 1.0, 4),
                gauss_panels([&](double r) { return part(r, true); }, 0.0, 1.0, 4));
    repro = std::max(repro, std::abs(ip - f(w)));
  }
  return {e_disc <= 1e-10 && e_ball <= 1e-10 && hermitian && repro <= 1e-8,
          fmt("|K_disc(0,0)-1/pi|=%.1e", e_disc) + fmt(", |K_ball(0,0)-2/pi^2|=%.1e", e_ball) +
              (hermitian ? ", Hermitian symmetry exact" : ", Hermitian symmetry BROKEN") +
              fmt(", reproducing err %.1e (tol 1e-8)", repro)};
}

// 9
Outcome wu() {
  auto ball = make_catalog_domain("ball");
  auto bidisc = make_catalog_domain("bidisc");
  const auto eb = wu_metric(ball, CVec::Zero(2), 32, 1e-8, false);
  const double e_ball = (eb.H - CMat::Identity(2, 2)).norm();
  const auto ed = wu_metric(bidisc, CVec::Zero(2), 64, 1e-8, false);
  const double e_bidisc = (ed.H - 0.5 * CMat::Identity(2, 2)).norm();
  const double contain = std::max(eb.max_constraint, ed.max_constraint) - 1.0;
  // unitary independence: rotating the samples conjugates H
  std::mt19937 rng(109);
  const auto s = indicatrix_sample(bidisc, make_point({0.2, cd(0.1, -0.3)}), 24);
  const auto base = mvee_hermitian(s.points, 1e-10);
  double unitary = 0.0;
  for (int i = 0; i < 3; ++i) {
    CMat a(2, 2);
    a.col(0) = random_unit(rng, 2);
    a.col(1) = random_unit(rng, 2);
    const CMat U = Eigen::HouseholderQR<CMat>(a).householderQ() * CMat::Identity(2, 2);
    std::vector<CVec> rot;
    for (const auto& v : s.points) rot.push_back(U * v);
    const auto e = mvee_hermitian(rot, 1e-10);
    unitary = std::max(unitary, (e.H - U * base.H * U.adjoint()).norm() / base.H.norm());
  }
  return {e_ball <= 1e-6 && e_bidisc <= 1e-4 && contain <= 1e-8 && unitary <= 1e-6,
          fmt("ball |H-I|=%.1e", e_ball) + fmt(", bidisc(res 64) |H-I/2|=%.1e", e_bidisc) +
              fmt(", containment excess %.1e", contain) + fmt(", unitary err %.1e", unitary)};
}

// 10
Outcome poisson() {
  const auto s = poisson_bound_scan(1);
  const double lo = 1.0 / (2.0 * kPi) - 1e-9, hi = 1.0 / kPi + 1e-9;
  bool inside = true;
  for (std::size_t i = 0; i < s.c1_by_level.size(); ++i) {
    inside = inside && s.c1_by_level[i] >= lo && s.c2_by_level[i] <= hi;
  }
  double norm_err = 0.0;
  for (double r : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999}) norm_err = std::max(norm_err, std::abs(poisson_integral(r, 1) - 1.0));
  return {inside && norm_err <= 1e-8,
          fmt("ratio range [%.10f, ", s.c1_hat) + fmt("%.10f] within [1/(2pi), 1/pi] on all levels", s.c2_hat) +
              fmt(", max|int P - 1|=%.1e (tol 1e-8)", norm_err)};
}

// 11
Outcome properties() {
  std::mt19937 rng(111);
  int failed = 0, checks = 0;
  auto check = [&](bool ok) {
    ++checks;
    if (!ok) ++failed;
  };
  for (int i = 0; i < 20; ++i) {
    const CVec a = random_in_ball(rng, 2, 0.9), q = random_in_ball(rng, 2, 0.9);
    const CVec xi = random_unit(rng, 2);
    const auto phi = ball_automorphism(a);
    const double f = ball_metric(q, xi);
    check(std::abs(ball_metric(phi(q), phi.jacobian(q) * xi) - f) <= 1e-8 * f);
    check(std::abs(f - ball_oracle(q, xi)) <= 1e-12 * f);
  }
  auto egg = make_catalog_domain("egg", {.dim = 2, .k = 2});
  auto bidisc = make_catalog_domain("bidisc");
  for (int i = 0; i < 20; ++i) {
    const CVec q = random_in_ball(rng, 2, 0.7);
    const CVec xi = random_unit(rng, 2);
    const cd c = std::polar(0.5 + i * 0.1, 0.3 * i);
    const auto s1 = kobayashi_sandwich(egg, q, xi);
    const auto s2 = kobayashi_sandwich(egg, q, CVec(c * xi));
    check(std::abs(s2.upper - std::abs(c) * s1.upper) <= 1e-6 * s2.upper);
    check(std::abs(ball_metric(q, CVec(c * xi)) - std::abs(c) * ball_metric(q, xi)) <= 1e-12 * std::abs(c) * ball_metric(q, xi));
    const double fb = ball_metric(q, xi);
    check(s1.lower <= fb * (1 + 1e-12));
    check(kobayashi_metric(bidisc, q, xi).value <= fb * (1 + 1e-12));
  }
  for (const auto& name : catalog_names()) {
    if (name == "disc") continue;
    CatalogParams p;
    p.k = 2;
    p.m = 2;
    auto rho = make_catalog_domain(name, p);
    for (int i = 0; i < 10; ++i) {
      CVec b;
      if (rho.traits().bounded) {
        const CVec u = random_unit(rng, 2);
        b = *ray_exit(rho, CVec::Zero(2), u) * u;
      } else {
        b = project_to_boundary(rho, CVec(0.3 * random_unit(rng, 2)));
      }
      const auto r = levi_classify(rho, b);
      check((r.levi_matrix - r.levi_matrix.adjoint()).norm() <= 1e-12 * (1 + r.levi_matrix.norm()));
    }
  }
  return {failed == 0, fmt("%.0f property checks", checks) + fmt(", %.0f failures", failed)};
}

}  // namespace

int main() {
  criterion(1, "klembeck-limit", 180, klembeck);
  criterion(2, "graham-normal-limit", 60, graham);
  criterion(3, "lee-ratio", 60, lee);
  criterion(4, "finite-type", 10, finite_type);
  criterion(5, "scaling-convergence", 60, scaling);
  criterion(6, "frankel-pinchuk", 60, frankel);
  criterion(7, "caratheodory-kernel", 60, kernel);
  criterion(8, "bergman-basics", 60, bergman);
  criterion(9, "wu-metric", 60, wu);
  criterion(10, "poisson-bound", 60, poisson);
  criterion(11, "property-suites", 60, properties);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
