#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cscale/types.hpp"

namespace cscale {

/// z -> M z + b on C^d.
class AffineMap {
 public:
  AffineMap() = default;
  AffineMap(CMat matrix, CVec translation, std::string metadata = {});

  static AffineMap identity(int dim);
  static AffineMap translation(const CVec& b);
  static AffineMap diagonal(const CVec& scale, const CVec& shift);

  int dim() const { return static_cast<int>(b_.size()); }
  const CMat& matrix() const { return m_; }
  const CVec& translation_part() const { return b_; }
  const std::string& metadata() const { return metadata_; }

  CVec operator()(const CVec& z) const { return m_ * z + b_; }
  /// (*this) o inner.
  AffineMap compose(const AffineMap& inner) const;
  AffineMap inverse() const;
  cd determinant() const { return m_.determinant(); }
  bool invertible() const { return std::abs(determinant()) > 1e-14; }

 private:
  CMat m_;
  CVec b_;
  std::string metadata_;
};

/// Holomorphic map with analytic Jacobian and optional inverse.
struct HoloMap {
  using Eval = std::function<CVec(const CVec&)>;
  using Jac = std::function<CMat(const CVec&)>;

  int dim = 0;
  Eval eval;
  Jac jacobian;
  std::optional<Eval> inverse;
  std::string tag;

  CVec operator()(const CVec& z) const { return eval(z); }
  bool has_inverse() const { return inverse.has_value(); }
  CVec apply_inverse(const CVec& w) const;

  static HoloMap from_affine(const AffineMap& a, std::string tag = "affine");
  static HoloMap identity(int dim);
};

/// outer o inner, Jacobians chained; inverse available when both have one.
HoloMap compose(const HoloMap& outer, const HoloMap& inner);

/// Central finite-difference Jacobian, used as an independent check.
CMat finite_difference_jacobian(const HoloMap::Eval& f, const CVec& z, double h = 1e-6);

}  // namespace cscale
