#include "cscale/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cscale/error.hpp"
#include "cscale/quadrature.hpp"

namespace cscale {

double sphere_measure(int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "sphere dimension must be >= 0");
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double poisson_ball(const RVec& x, const RVec& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  const double x2 = x.squaredNorm();
  if (!(x2 < 1.0)) throw Error(ErrorKind::NotInterior, "x must lie inside the unit ball");
  if (std::abs(y.norm() - 1.0) > 1e-12) throw Error(ErrorKind::NotOnBoundary, "y must lie on the unit sphere");
  const int n = static_cast<int>(x.size()) - 1;
  return (1.0 - x2) / (sphere_measure(n) * std::pow((x - y).norm(), n + 1));
}

double poisson_integral(double r, int n, double rel_tol) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorKind::NotInterior, "radius must lie in [0, 1)");
  const double wn = sphere_measure(n);
  const double wn1 = sphere_measure(n - 1);
  auto f = [&](double th) {
    const double sh = std::sin(0.5 * th);
    const double dist2 = (1.0 - r) * (1.0 - r) + 4.0 * r * sh * sh;
    return wn1 * std::pow(std::sin(th), n - 1) * (1.0 - r * r) / (wn * std::pow(dist2, 0.5 * (n + 1)));
  };
  double prev = gauss_graded(f, 0.0, kPi, 4, 2.0);
  for (int panels = 8; panels <= 4096; panels *= 2) {
    const double cur = gauss_graded(f, 0.0, kPi, panels, std::pow(1.0 + 1.0 / (1.0 - r), 2.0 / std::sqrt(panels)));
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw Error(ErrorKind::Truncation, "Poisson normalization integral did not converge");
}

namespace {

std::vector<double> level_radii(const PoissonGrid& g, int level) {
  std::vector<double> r;
  if (!g.radii.empty()) {
    r = g.radii;
  } else {
    const int count = g.radial << level;
    for (int i = 0; i <= count; ++i) r.push_back(g.r_max * i / count);
  }
  if (g.boundary_layer) {
    for (int j = 1; j <= 4; ++j) r.push_back(std::min(g.r_max, 1.0 - std::pow(10.0, -j)));
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

}  // namespace

PoissonScan poisson_bound_scan(int n, const PoissonGrid& grid) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (grid.levels < 1 || grid.angular < 1 || (grid.radii.empty() && grid.radial < 1 && !grid.boundary_layer)) {
    throw Error(ErrorKind::InvalidArgument, "empty grid");
  }
  PoissonScan s;
  s.n = n;
  const double wn = sphere_measure(n);
  s.envelope_low = 1.0 / wn;
  s.envelope_high = 2.0 / wn;
  s.stability.quantity = "poisson_bound_stability";
  s.stability.tolerance = 1e-6;
  s.stability.window = 1;
  for (int level = 0; level < grid.levels; ++level) {
    const auto radii = level_radii(grid, level);
    if (radii.empty()) throw Error(ErrorKind::InvalidArgument, "empty grid");
    const int na = grid.angular << level;
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    const bool finest = level + 1 == grid.levels;
    for (double r : radii) {
      if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorKind::NotInterior, "grid radius outside [0, 1)");
      RVec x = RVec::Zero(n + 1);
      x[0] = r;
      for (int a = 0; a <= na; ++a) {
        const double th = kPi * a / na;
        RVec y = RVec::Zero(n + 1);
        y[0] = std::cos(th);
        y[1] = std::sin(th);
        const double p = poisson_ball(x, y);
        const double ratio = p * std::pow((x - y).norm(), n + 1) / (1.0 - r);
        c1 = std::min(c1, ratio);
        c2 = std::max(c2, ratio);
        if (finest) s.rows.push_back({level, x, y, p, ratio});
      }
    }
    s.c1_by_level.push_back(c1);
    s.c2_by_level.push_back(c2);
    if (level > 0) {
      s.stability.rows.push_back({level, std::abs(c1 - s.c1_by_level[static_cast<std::size_t>(level - 1)]),
                                  std::abs(c2 - s.c2_by_level[static_cast<std::size_t>(level - 1)]), 0.0});
    }
  }
  s.c1_hat = s.c1_by_level.back();
  s.c2_hat = s.c2_by_level.back();
  s.stability.finalize();
  const bool stable = s.stability.rows.empty() || s.stability.pass;
  s.pass = s.c1_hat > 0.0 && s.c1_hat <= s.c2_hat && std::isfinite(s.c2_hat) && stable;
  return s;
}

namespace {
std::string join(const RVec& v) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}
}  // namespace

std::string PoissonScan::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "x,y,P,ratio\n";
  for (const auto& r : rows) out << join(r.x) << ',' << join(r.y) << ',' << r.P << ',' << r.ratio << '\n';
  return out.str();
}

nlohmann::json to_json(const PoissonScan& s) {
  return {{"n", s.n},
          {"c1_hat", s.c1_hat},
          {"c2_hat", s.c2_hat},
          {"c1_by_level", s.c1_by_level},
          {"c2_by_level", s.c2_by_level},
          {"envelope", {s.envelope_low, s.envelope_high}},
          {"stability", to_json(s.stability)},
          {"verdict", s.verdict()}};
}

}  // namespace cscale
