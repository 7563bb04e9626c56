#include "cscale/poly.hpp"

#include <algorithm>
#include <cmath>

#include "cscale/error.hpp"

namespace cscale {

namespace {

cd power(cd base, int n) {
  cd r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

std::vector<cd> poly_mul_trunc(const std::vector<cd>& a, const std::vector<cd>& b, int order) {
  std::vector<cd> out(static_cast<std::size_t>(order + 1), cd(0.0));
  for (std::size_t i = 0; i < a.size() && static_cast<int>(i) <= order; ++i) {
    if (a[i] == cd(0.0)) continue;
    for (std::size_t j = 0; j < b.size() && static_cast<int>(i + j) <= order; ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- HoloPoly

HoloPoly HoloPoly::constant(int dim, cd value) {
  HoloPoly p(dim);
  p.add_term(Exponent(static_cast<std::size_t>(dim), 0), value);
  return p;
}

HoloPoly HoloPoly::variable(int dim, int j) {
  HoloPoly p(dim);
  Exponent e(static_cast<std::size_t>(dim), 0);
  e[static_cast<std::size_t>(j)] = 1;
  p.add_term(e, 1.0);
  return p;
}

HoloPoly HoloPoly::quadratic(cd a, const CVec& b, const CMat& q) {
  const int dim = static_cast<int>(b.size());
  HoloPoly p = constant(dim, a);
  for (int j = 0; j < dim; ++j) {
    Exponent e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(j)] = 1;
    p.add_term(e, b[j]);
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      Exponent e(static_cast<std::size_t>(dim), 0);
      e[static_cast<std::size_t>(j)] += 1;
      e[static_cast<std::size_t>(k)] += 1;
      p.add_term(e, q(j, k));
    }
  }
  return p;
}

void HoloPoly::add_term(const Exponent& e, cd c) {
  if (c == cd(0.0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cd(0.0)) terms_.erase(it);
  }
}

cd HoloPoly::operator()(const CVec& z) const {
  cd sum = 0.0;
  for (const auto& [e, c] : terms_) {
    cd m = c;
    for (int j = 0; j < dim_; ++j) m *= power(z[j], e[static_cast<std::size_t>(j)]);
    sum += m;
  }
  return sum;
}

HoloPoly HoloPoly::derivative(int j) const {
  HoloPoly out(dim_);
  for (const auto& [e, c] : terms_) {
    int n = e[static_cast<std::size_t>(j)];
    if (n == 0) continue;
    Exponent f = e;
    f[static_cast<std::size_t>(j)] -= 1;
    out.add_term(f, c * static_cast<double>(n));
  }
  return out;
}

int HoloPoly::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    deg = std::max(deg, s);
  }
  return deg;
}

HoloPoly& HoloPoly::operator+=(const HoloPoly& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

HoloPoly operator*(const HoloPoly& a, const HoloPoly& b) {
  HoloPoly out(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

HoloPoly operator*(cd s, HoloPoly a) {
  for (auto& [e, c] : a.terms_) c *= s;
  return a;
}

HoloPoly HoloPoly::pow(int n) const {
  HoloPoly result = constant(dim_, 1.0);
  for (int i = 0; i < n; ++i) result = result * *this;
  return result;
}

// ---------------------------------------------------------------- CurveJet

int CurveJet::vanishing_order(double threshold) const {
  for (int total = 0; total <= order; ++total) {
    for (int i = 0; i <= total; ++i) {
      if (std::abs(coeff(i, total - i)) > threshold) return total;
    }
  }
  return order + 1;
}

// ---------------------------------------------------------------- RealPoly

RealPoly RealPoly::product(const HoloPoly& p, const HoloPoly& q) {
  const int dim = p.dim();
  RealPoly out(dim);
  for (const auto& [ea, ca] : p.terms()) {
    for (const auto& [eb, cb] : q.terms()) {
      Exponent e(static_cast<std::size_t>(2 * dim), 0);
      std::copy(ea.begin(), ea.end(), e.begin());
      std::copy(eb.begin(), eb.end(), e.begin() + dim);
      out.add_term(e, ca * std::conj(cb));
    }
  }
  return out;
}

RealPoly RealPoly::constant(int dim, double value) {
  RealPoly p(dim);
  p.add_term(Exponent(static_cast<std::size_t>(2 * dim), 0), value);
  return p;
}

RealPoly RealPoly::abs_pow(int dim, int j, int n) {
  RealPoly p(dim);
  Exponent e(static_cast<std::size_t>(2 * dim), 0);
  e[static_cast<std::size_t>(j)] = n;
  e[static_cast<std::size_t>(dim + j)] = n;
  p.add_term(e, 1.0);
  return p;
}

RealPoly RealPoly::real_part(int dim, int j) {
  RealPoly p(dim);
  Exponent e(static_cast<std::size_t>(2 * dim), 0);
  e[static_cast<std::size_t>(j)] = 1;
  p.add_term(e, 0.5);
  e[static_cast<std::size_t>(j)] = 0;
  e[static_cast<std::size_t>(dim + j)] = 1;
  p.add_term(e, 0.5);
  return p;
}

void RealPoly::add_term(const Exponent& e, cd c) {
  if (c == cd(0.0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cd(0.0)) terms_.erase(it);
  }
}

cd RealPoly::evaluate(const CVec& z) const {
  cd sum = 0.0;
  for (const auto& [e, c] : terms_) {
    cd m = c;
    for (int j = 0; j < dim_; ++j) {
      m *= power(z[j], e[static_cast<std::size_t>(j)]);
      m *= power(std::conj(z[j]), e[static_cast<std::size_t>(dim_ + j)]);
    }
    sum += m;
  }
  return sum;
}

RealPoly RealPoly::d_holo(int j) const {
  RealPoly out(dim_);
  for (const auto& [e, c] : terms_) {
    int n = e[static_cast<std::size_t>(j)];
    if (n == 0) continue;
    Exponent f = e;
    f[static_cast<std::size_t>(j)] -= 1;
    out.add_term(f, c * static_cast<double>(n));
  }
  return out;
}

RealPoly RealPoly::d_anti(int j) const {
  RealPoly out(dim_);
  for (const auto& [e, c] : terms_) {
    int n = e[static_cast<std::size_t>(dim_ + j)];
    if (n == 0) continue;
    Exponent f = e;
    f[static_cast<std::size_t>(dim_ + j)] -= 1;
    out.add_term(f, c * static_cast<double>(n));
  }
  return out;
}

RealPoly& RealPoly::operator+=(const RealPoly& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

RealPoly operator*(const RealPoly& a, const RealPoly& b) {
  RealPoly out(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

RealPoly operator*(double s, RealPoly a) {
  for (auto& [e, c] : a.terms_) c *= s;
  return a;
}

RealPoly RealPoly::compose(const std::vector<HoloPoly>& map) const {
  if (static_cast<int>(map.size()) != dim_) {
    throw Error(ErrorKind::InvalidArgument, "composition map has wrong number of components");
  }
  const int m = map.empty() ? 0 : map.front().dim();
  // powers[j][n] = G_j^n, filled lazily.
  std::vector<std::vector<HoloPoly>> powers(static_cast<std::size_t>(dim_));
  auto pw = [&](int j, int n) -> const HoloPoly& {
    auto& list = powers[static_cast<std::size_t>(j)];
    if (list.empty()) list.push_back(HoloPoly::constant(m, 1.0));
    while (static_cast<int>(list.size()) <= n) list.push_back(list.back() * map[static_cast<std::size_t>(j)]);
    return list[static_cast<std::size_t>(n)];
  };
  RealPoly out(m);
  for (const auto& [e, c] : terms_) {
    HoloPoly holo = HoloPoly::constant(m, c);
    HoloPoly anti = HoloPoly::constant(m, 1.0);
    for (int j = 0; j < dim_; ++j) {
      if (int n = e[static_cast<std::size_t>(j)]; n > 0) holo = holo * pw(j, n);
      if (int n = e[static_cast<std::size_t>(dim_ + j)]; n > 0) anti = anti * pw(j, n);
    }
    out += product(holo, anti);
  }
  return out;
}

CurveJet RealPoly::along_curve(const std::vector<std::vector<cd>>& curve, int order) const {
  if (static_cast<int>(curve.size()) != dim_) {
    throw Error(ErrorKind::InvalidArgument, "curve has wrong number of components");
  }
  std::vector<std::vector<std::vector<cd>>> powers(static_cast<std::size_t>(dim_));
  auto pw = [&](int j, int n) -> const std::vector<cd>& {
    auto& list = powers[static_cast<std::size_t>(j)];
    if (list.empty()) list.push_back({cd(1.0)});
    while (static_cast<int>(list.size()) <= n) {
      list.push_back(poly_mul_trunc(list.back(), curve[static_cast<std::size_t>(j)], order));
    }
    return list[static_cast<std::size_t>(n)];
  };
  CurveJet jet;
  jet.order = order;
  jet.coeff = Eigen::MatrixXcd::Zero(order + 1, order + 1);
  for (const auto& [e, c] : terms_) {
    std::vector<cd> holo{c};
    std::vector<cd> anti{cd(1.0)};
    for (int j = 0; j < dim_; ++j) {
      if (int n = e[static_cast<std::size_t>(j)]; n > 0) holo = poly_mul_trunc(holo, pw(j, n), order);
      if (int n = e[static_cast<std::size_t>(dim_ + j)]; n > 0) anti = poly_mul_trunc(anti, pw(j, n), order);
    }
    for (std::size_t i = 0; i < holo.size(); ++i) {
      if (holo[i] == cd(0.0)) continue;
      for (std::size_t k = 0; k < anti.size() && static_cast<int>(i + k) <= order; ++k) {
        jet.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += holo[i] * std::conj(anti[k]);
      }
    }
  }
  return jet;
}

void RealPoly::prune(double eps) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= eps) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace cscale
