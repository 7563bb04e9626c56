#pragma once

#include <map>
#include <vector>

#include "cscale/types.hpp"

namespace cscale {

using Exponent = std::vector<int>;

/// Holomorphic polynomial in d complex variables with complex coefficients.
class HoloPoly {
 public:
  explicit HoloPoly(int dim = 0) : dim_(dim) {}

  static HoloPoly constant(int dim, cd value);
  static HoloPoly variable(int dim, int j);
  /// Affine-plus-quadratic form a + b.z + z^T Q z.
  static HoloPoly quadratic(cd a, const CVec& b, const CMat& q);

  int dim() const { return dim_; }
  const std::map<Exponent, cd>& terms() const { return terms_; }
  void add_term(const Exponent& e, cd c);

  cd operator()(const CVec& z) const;
  /// Partial derivative d/dz_j.
  HoloPoly derivative(int j) const;
  int degree() const;

  HoloPoly& operator+=(const HoloPoly& other);
  friend HoloPoly operator+(HoloPoly a, const HoloPoly& b) { return a += b; }
  friend HoloPoly operator*(const HoloPoly& a, const HoloPoly& b);
  friend HoloPoly operator*(cd s, HoloPoly a);
  HoloPoly pow(int n) const;

 private:
  int dim_;
  std::map<Exponent, cd> terms_;
};

/// Coefficients c_{ik} of a real-analytic function of one complex variable t
/// expanded as sum c_{ik} t^i conj(t)^k, truncated to total degree <= order.
struct CurveJet {
  int order = 0;
  Eigen::MatrixXcd coeff;  // (order+1) x (order+1), entries with i+k > order are zero

  /// Smallest total degree carrying a coefficient above `threshold`;
  /// returns order + 1 when every retained coefficient vanishes.
  int vanishing_order(double threshold) const;
};

/// Polynomial in z and conj(z): sum c_{ab} z^a conj(z)^b. Catalog defining
/// functions are stored in this form so that derivatives, compositions with
/// holomorphic polynomial maps and jets along curves are exact.
class RealPoly {
 public:
  explicit RealPoly(int dim = 0) : dim_(dim) {}

  /// P(z) * conj(Q(z)).
  static RealPoly product(const HoloPoly& p, const HoloPoly& q);
  static RealPoly constant(int dim, double value);
  /// |z_j|^(2n).
  static RealPoly abs_pow(int dim, int j, int n);
  /// Re(z_j).
  static RealPoly real_part(int dim, int j);

  int dim() const { return dim_; }
  /// Exponent layout: first dim entries holomorphic, last dim antiholomorphic.
  const std::map<Exponent, cd>& terms() const { return terms_; }
  void add_term(const Exponent& e, cd c);

  /// Complex value; the real part is the function value for real polynomials.
  cd evaluate(const CVec& z) const;
  double operator()(const CVec& z) const { return evaluate(z).real(); }

  RealPoly d_holo(int j) const;
  RealPoly d_anti(int j) const;

  RealPoly& operator+=(const RealPoly& other);
  friend RealPoly operator+(RealPoly a, const RealPoly& b) { return a += b; }
  friend RealPoly operator*(const RealPoly& a, const RealPoly& b);
  friend RealPoly operator*(double s, RealPoly a);

  /// rho(G(w)) for a holomorphic polynomial map G: C^m -> C^dim.
  RealPoly compose(const std::vector<HoloPoly>& map) const;

  /// Jet of t -> rho(curve(t)), each coordinate of the curve a univariate
  /// polynomial given by its coefficient list (index = power of t).
  CurveJet along_curve(const std::vector<std::vector<cd>>& curve, int order) const;

  /// Drops terms whose coefficient modulus is <= eps.
  void prune(double eps);

 private:
  int dim_;
  std::map<Exponent, cd> terms_;
};

}  // namespace cscale
