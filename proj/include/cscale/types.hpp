#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cscale {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

/// A point of C^d. Coordinates are indexed 0..d-1; coordinate 0 plays the
/// role of the complex normal direction in every normal-form chart.
using ComplexPoint = CVec;

inline constexpr double kPi = 3.14159265358979323846;

/// Global defaults; every operation that uses one also accepts an override.
inline constexpr double kBoundaryTol = 1e-10;
inline constexpr double kEigenTol = 1e-8;

/// Throws InvalidArgument unless all coordinates are finite and the
/// dimension matches `dim` (when dim > 0).
void require_point(const CVec& z, int dim, const char* what);

/// Real inner product of C^d viewed as R^{2d}.
inline double real_dot(const CVec& a, const CVec& b) { return a.dot(b).real(); }

/// Parses "1,0" / "0.5:0.25,1" (comma separated re[:im] entries).
CVec parse_point(std::string_view text);
std::string format_point(const CVec& z);

/// Builds a vector from an initializer list of complex numbers.
CVec make_point(std::initializer_list<cd> values);

}  // namespace cscale
