#include "cscale/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "cscale/error.hpp"

namespace cscale {

namespace {
using Rule = boost::math::quadrature::gauss<double, 30>;
}

double gauss_panels(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw Error(ErrorKind::InvalidArgument, "panel count must be positive");
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) sum += Rule::integrate(f, a + i * h, a + (i + 1) * h);
  return sum;
}

double gauss_graded(const std::function<double(double)>& f, double a, double b, int panels, double ratio) {
  if (panels < 1) throw Error(ErrorKind::InvalidArgument, "panel count must be positive");
  if (ratio == 1.0) return gauss_panels(f, a, b, panels);
  const double first = (b - a) * (ratio - 1.0) / (std::pow(ratio, panels) - 1.0);
  double sum = 0.0, x = a, h = first;
  for (int i = 0; i < panels; ++i) {
    const double next = (i + 1 == panels) ? b : x + h;
    sum += Rule::integrate(f, x, next);
    x = next;
    h *= ratio;
  }
  return sum;
}

QuadResult integrate_doubling(const std::function<double(double)>& f, double a, double b, double rel_tol,
                              int start_panels, int max_panels) {
  QuadResult r;
  r.panels = std::max(1, start_panels);
  double prev = gauss_panels(f, a, b, r.panels);
  while (r.panels < max_panels) {
    r.panels *= 2;
    r.value = gauss_panels(f, a, b, r.panels);
    r.rel_change = std::abs(r.value - prev) / std::max(std::abs(r.value), 1e-300);
    if (r.rel_change < rel_tol) return r;
    prev = r.value;
  }
  throw Error(ErrorKind::Truncation, "quadrature did not converge to the requested tolerance");
}

}  // namespace cscale
