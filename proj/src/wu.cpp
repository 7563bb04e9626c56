#include "cscale/wu.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "cscale/error.hpp"
#include "cscale/invmetrics.hpp"

namespace cscale {

namespace {

// magnitudes on the positive orthant of S^{d-1} by hyperspherical angles
void magnitudes(int dim, int res, std::vector<double>& prefix, std::vector<std::vector<double>>& out) {
  const int left = dim - static_cast<int>(prefix.size());
  if (left == 1) {
    double s = 1.0;
    for (double p : prefix) s -= p * p;
    auto m = prefix;
    m.push_back(std::sqrt(std::max(0.0, s)));
    out.push_back(std::move(m));
    return;
  }
  double rem = 1.0;
  for (double p : prefix) rem -= p * p;
  rem = std::sqrt(std::max(0.0, rem));
  for (int i = 0; i <= res; ++i) {
    const double phi = 0.5 * kPi * i / res;
    prefix.push_back(rem * std::cos(phi));
    if (i == res) prefix.back() = 0.0;
    magnitudes(dim, res, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<CVec> sphere_directions(int dim, int resolution) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  std::vector<std::vector<double>> mags;
  std::vector<double> prefix;
  magnitudes(dim, resolution, prefix, mags);
  std::vector<CVec> out;
  for (const auto& m : mags) {
    // coordinate 0 carries the fixed phase; phases only on nonzero entries
    int first = 0;
    while (first < dim && m[static_cast<std::size_t>(first)] == 0.0) ++first;
    std::vector<int> free;
    for (int j = first + 1; j < dim; ++j)
      if (m[static_cast<std::size_t>(j)] != 0.0) free.push_back(j);
    std::vector<int> idx(free.size(), 0);
    for (;;) {
      CVec u = CVec::Zero(dim);
      for (int j = 0; j < dim; ++j) u[j] = m[static_cast<std::size_t>(j)];
      for (std::size_t f = 0; f < free.size(); ++f) {
        u[free[f]] *= std::polar(1.0, 2.0 * kPi * idx[f] / resolution);
      }
      out.push_back(u);
      std::size_t f = 0;
      while (f < idx.size() && idx[f] == resolution - 1) idx[f++] = 0;
      if (f == idx.size()) break;
      ++idx[f];
    }
  }
  return out;
}

IndicatrixSample indicatrix_sample(const DefiningFunction& rho, const CVec& q, int resolution) {
  if (!has_closed_form(rho)) {
    throw Error(ErrorKind::Unsupported, "indicatrix needs a closed-form Kobayashi metric for '" + rho.tag() + "'");
  }
  IndicatrixSample s;
  s.base_point = q;
  s.resolution = resolution;
  for (const CVec& u : sphere_directions(rho.dim(), resolution)) {
    const double f = kobayashi_closed_form(rho, q, u).value;
    if (!(f > 0.0)) throw Error(ErrorKind::Unsupported, "indicatrix is unbounded in some direction");
    s.points.push_back(u / f);
  }
  return s;
}

WuEllipsoid mvee_hermitian(const std::vector<CVec>& samples, double tol, int max_iter) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
  const int d = static_cast<int>(samples.front().size());
  const int m = static_cast<int>(samples.size());
  if (m < 2 * d) throw Error(ErrorKind::InvalidArgument, "need at least 2d samples");
  CMat vt(d, m);
  for (int i = 0; i < m; ++i) vt.col(i) = samples[static_cast<std::size_t>(i)];
  RVec u = RVec::Constant(m, 1.0 / m);
  auto scatter = [&]() {
    CMat x = vt * u.cast<cd>().asDiagonal() * vt.adjoint();
    return CMat(0.5 * (x + x.adjoint()));
  };
  {
    Eigen::SelfAdjointEigenSolver<CMat> es(scatter());
    const RVec ev = es.eigenvalues();
    if (ev.minCoeff() <= 1e-12 * std::max(ev.maxCoeff(), 1e-300)) {
      throw Error(ErrorKind::RankDeficient, "samples do not span C^d");
    }
  }
  WuEllipsoid e;
  CMat xinv;
  for (int it = 0;; ++it) {
    Eigen::LLT<CMat> llt(scatter());
    xinv = llt.solve(CMat::Identity(d, d));
    const CMat w = llt.matrixL().solve(vt);
    const RVec mval = w.colwise().squaredNorm().transpose();
    Eigen::Index j = 0;
    const double kappa = mval.maxCoeff(&j);
    int k = -1;
    double low = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (u[i] > 0.0 && mval[i] < low) {
        low = mval[i];
        k = i;
      }
    }
    e.gap = kappa / d - 1.0;
    e.iterations = it;
    if (e.gap <= tol) break;
    if (it >= max_iter) throw Error(ErrorKind::IterationCap, "ellipsoid iteration cap reached");
    if (kappa - d >= d - low || k < 0) {
      const double alpha = (kappa - d) / (d * (kappa - 1.0));
      u *= (1.0 - alpha);
      u[j] += alpha;
    } else {
      const double uk = u[k];
      double alpha = uk / (1.0 - uk);
      if (low > 1.0) alpha = std::min(alpha, (d - low) / (d * (low - 1.0)));
      u *= (1.0 + alpha);
      u[k] -= alpha;
      if (u[k] < 1e-300) u[k] = 0.0;
    }
  }
  CMat h = xinv / static_cast<double>(d);
  h = 0.5 * (h + h.adjoint());
  double worst = 0.0;
  for (const CVec& v : samples) worst = std::max(worst, (v.adjoint() * h * v)(0).real());
  if (worst > 1.0) h /= worst;
  e.H = h;
  e.det = h.determinant().real();
  e.max_constraint = 0.0;
  for (const CVec& v : samples) e.max_constraint = std::max(e.max_constraint, (v.adjoint() * h * v)(0).real());
  const double cutoff = std::max(tol, 1e-12);
  for (int i = 0; i < m; ++i)
    if (u[i] > cutoff) e.support.push_back(i);
  return e;
}

WuEllipsoid wu_metric(const DefiningFunction& rho, const CVec& q, int resolution, double tol, bool refine,
                      int max_resolution) {
  require_point(q, rho.dim(), "point");
  if (!(rho(q) < 0.0)) throw Error(ErrorKind::NotInterior, "point is not interior");
  WuEllipsoid e = mvee_hermitian(indicatrix_sample(rho, q, resolution).points, tol);
  e.resolution = resolution;
  if (!refine) return e;
  for (int res = 2 * resolution; res <= max_resolution; res *= 2) {
    WuEllipsoid next = mvee_hermitian(indicatrix_sample(rho, q, res).points, tol);
    next.resolution = res;
    const double change = std::abs(next.det - e.det) / std::abs(next.det);
    e = next;
    if (change < 1e-6) break;
  }
  return e;
}

nlohmann::json to_json(const WuEllipsoid& e) {
  auto h = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.H.rows(); ++i)
    for (Eigen::Index j = 0; j < e.H.cols(); ++j) h.push_back({e.H(i, j).real(), e.H(i, j).imag()});
  return {{"dim", e.H.rows()},
          {"H", h},
          {"det", e.det},
          {"volume_proxy", 1.0 / e.det},
          {"support", e.support},
          {"iterations", e.iterations},
          {"max_constraint", e.max_constraint},
          {"gap", e.gap},
          {"resolution", e.resolution}};
}

}  // namespace cscale
