#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cscale/geometry.hpp"

namespace cscale {

struct IndicatrixSample {
  CVec base_point;
  int resolution = 0;
  std::vector<CVec> points;  // F_K(q, v) = 1
};

/// Directions u on the unit sphere (overall phase fixed), scaled to v = u / F_K(q, u).
IndicatrixSample indicatrix_sample(const DefiningFunction& rho, const CVec& q, int resolution);

/// Unit-sphere direction grid used by indicatrix_sample.
std::vector<CVec> sphere_directions(int dim, int resolution);

struct WuEllipsoid {
  CMat H;
  double det = 0.0;
  std::vector<int> support;
  int iterations = 0;
  double max_constraint = 0.0;  // max v^H H v over the samples
  double gap = 0.0;             // max_i v_i^H X^{-1} v_i / d - 1 at termination
  int resolution = 0;
};

/// Minimum-volume Hermitian ellipsoid {v : v^H H v <= 1} containing the samples,
/// Khachiyan iteration with away steps on the weight simplex.
WuEllipsoid mvee_hermitian(const std::vector<CVec>& samples, double tol = 1e-8, int max_iter = 100000);

/// Wu form at q. With refine, the resolution doubles until det H changes by
/// less than 1e-6 (relative) or max_resolution is reached.
WuEllipsoid wu_metric(const DefiningFunction& rho, const CVec& q, int resolution = 32, double tol = 1e-8,
                      bool refine = true, int max_resolution = 256);

nlohmann::json to_json(const WuEllipsoid& e);

}  // namespace cscale
