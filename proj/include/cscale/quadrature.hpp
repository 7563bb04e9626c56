#pragma once

#include <functional>
#include <vector>

namespace cscale {

struct QuadResult {
  double value = 0.0;
  int panels = 0;
  double rel_change = 0.0;
};

/// Composite 30-point Gauss-Legendre rule on equal panels of [a, b].
double gauss_panels(const std::function<double(double)>& f, double a, double b, int panels);

/// Composite rule on panels whose widths grow geometrically by `ratio` from a.
double gauss_graded(const std::function<double(double)>& f, double a, double b, int panels, double ratio);

/// Doubles the panel count until successive values agree to rel_tol.
/// Throws Truncation if max_panels is reached first.
QuadResult integrate_doubling(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-12, int start_panels = 2, int max_panels = 1 << 14);

}  // namespace cscale
