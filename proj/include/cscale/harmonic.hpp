#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cscale/scaling.hpp"
#include "cscale/types.hpp"

namespace cscale {

/// Surface measure of the unit sphere S^n in R^{n+1}.
double sphere_measure(int n);

/// Poisson kernel of the unit ball in R^{n+1}, n + 1 = x.size().
double poisson_ball(const RVec& x, const RVec& y);

/// Integral of P(x, .) over the unit sphere for x = (r, 0, ..., 0), reduced
/// to one polar angle and integrated on panels graded toward the pole.
double poisson_integral(double r, int n, double rel_tol = 1e-12);

struct PoissonGrid {
  int radial = 16;   // uniform radii on level 0
  int angular = 32;  // boundary angles on level 0
  int levels = 4;    // each level doubles both counts
  double r_max = 1.0 - 1e-4;
  /// Explicit radii replace the uniform ones (boundary layer still added unless empty).
  std::vector<double> radii;
  bool boundary_layer = true;  // adds 1 - 10^-j, j = 1..4, capped at r_max
};

struct PoissonRow {
  int level = 0;
  RVec x;
  RVec y;
  double P = 0.0;
  double ratio = 0.0;  // P |x - y|^{n+1} / (1 - |x|)
};

struct PoissonScan {
  int n = 1;
  std::vector<double> c1_by_level;
  std::vector<double> c2_by_level;
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  double envelope_low = 0.0;   // 1 / omega_n
  double envelope_high = 0.0;  // 2 / omega_n
  std::vector<PoissonRow> rows;  // finest level
  ConvergenceReport stability;   // per-level changes of (c1, c2)
  bool pass = false;

  std::string verdict() const { return pass ? "pass" : "fail"; }
  std::string to_csv() const;
};

nlohmann::json to_json(const PoissonScan& s);

PoissonScan poisson_bound_scan(int n, const PoissonGrid& grid = {});

}  // namespace cscale
