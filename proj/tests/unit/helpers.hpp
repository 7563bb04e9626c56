#pragma once

#include <random>

#include <Eigen/QR>

#include "cscale/types.hpp"

namespace testing {

using cscale::CMat;
using cscale::CVec;
using cscale::cd;

inline CVec random_vector(std::mt19937& rng, int dim, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVec v(dim);
  for (int j = 0; j < dim; ++j) v[j] = scale * cd(n(rng), n(rng));
  return v;
}

inline CVec random_unit(std::mt19937& rng, int dim) {
  CVec v = random_vector(rng, dim);
  return v / v.norm();
}

/// Uniform point of the open ball of radius r.
inline CVec random_in_ball(std::mt19937& rng, int dim, double r = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return random_unit(rng, dim) * r * std::pow(u(rng), 1.0 / (2 * dim));
}

inline CMat random_unitary(std::mt19937& rng, int dim) {
  CMat a(dim, dim);
  for (int j = 0; j < dim; ++j) a.col(j) = random_vector(rng, dim);
  Eigen::HouseholderQR<CMat> qr(a);
  return qr.householderQ() * CMat::Identity(dim, dim);
}

}  // namespace testing
