#include "cscale/maps.hpp"

#include "cscale/error.hpp"

namespace cscale {

AffineMap::AffineMap(CMat matrix, CVec translation, std::string metadata)
    : m_(std::move(matrix)), b_(std::move(translation)), metadata_(std::move(metadata)) {
  if (m_.rows() != m_.cols() || m_.rows() != b_.size()) {
    throw Error(ErrorKind::InvalidArgument, "affine map shape mismatch");
  }
}

AffineMap AffineMap::identity(int dim) { return {CMat::Identity(dim, dim), CVec::Zero(dim)}; }

AffineMap AffineMap::translation(const CVec& b) {
  return {CMat::Identity(b.size(), b.size()), b};
}

AffineMap AffineMap::diagonal(const CVec& scale, const CVec& shift) {
  return {scale.asDiagonal().toDenseMatrix(), shift};
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  return {m_ * inner.m_, m_ * inner.b_ + b_, metadata_};
}

AffineMap AffineMap::inverse() const {
  if (!invertible()) throw Error(ErrorKind::SingularJacobian, "affine map is not invertible");
  Eigen::PartialPivLU<CMat> lu(m_);
  CMat inv = lu.inverse();
  return {inv, -(inv * b_), metadata_};
}

CVec HoloMap::apply_inverse(const CVec& w) const {
  if (!inverse) throw Error(ErrorKind::Unsupported, "map '" + tag + "' has no inverse");
  return (*inverse)(w);
}

HoloMap HoloMap::from_affine(const AffineMap& a, std::string tag) {
  HoloMap h;
  h.dim = a.dim();
  h.eval = [a](const CVec& z) { return a(z); };
  h.jacobian = [m = a.matrix()](const CVec&) { return m; };
  if (a.invertible()) {
    AffineMap inv = a.inverse();
    h.inverse = [inv](const CVec& w) { return inv(w); };
  }
  h.tag = std::move(tag);
  return h;
}

HoloMap HoloMap::identity(int dim) { return from_affine(AffineMap::identity(dim), "identity"); }

HoloMap compose(const HoloMap& outer, const HoloMap& inner) {
  HoloMap h;
  h.dim = inner.dim;
  h.eval = [outer, inner](const CVec& z) { return outer.eval(inner.eval(z)); };
  h.jacobian = [outer, inner](const CVec& z) {
    return CMat(outer.jacobian(inner.eval(z)) * inner.jacobian(z));
  };
  if (outer.inverse && inner.inverse) {
    h.inverse = [outer, inner](const CVec& w) { return (*inner.inverse)((*outer.inverse)(w)); };
  }
  h.tag = outer.tag + "∘" + inner.tag;
  return h;
}

CMat finite_difference_jacobian(const HoloMap::Eval& f, const CVec& z, double h) {
  const Eigen::Index d = z.size();
  CVec f0 = f(z);
  CMat jac(f0.size(), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    CVec zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    jac.col(j) = (f(zp) - f(zm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace cscale
