#include "l0iht/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace l0iht {

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Zero: return "zero";
    case ConeKind::Free: return "free";
    case ConeKind::Nonneg: return "nonneg";
    case ConeKind::SecondOrder: return "soc";
  }
  return "?";
}

ConeKind cone_kind_from_string(const std::string& name) {
  if (name == "zero") return ConeKind::Zero;
  if (name == "free") return ConeKind::Free;
  if (name == "nonneg") return ConeKind::Nonneg;
  if (name == "soc") return ConeKind::SecondOrder;
  throw ParameterError("unknown cone type '" + name + "'");
}

ConeSpec::ConeSpec(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks)) {
  for (const ConeBlock& b : blocks_) {
    if (b.dim < 1) throw ParameterError("cone block dimension must be >= 1");
    dim_ += b.dim;
  }
}

Vector project_soc(const Vector& v) {
  if (v.size() == 0) return v;
  const double t = v(0);
  const Index k = v.size() - 1;
  const double r = v.tail(k).norm();
  if (r <= t) return v;
  if (r <= -t) return Vector::Zero(v.size());
  const double a = 0.5 * (t + r);
  Vector out(v.size());
  out(0) = a;
  out.tail(k) = (a / r) * v.tail(k);
  return out;
}

Vector ConeSpec::project_dual(const Vector& v) const {
  require_dim(v.size(), dim_, "dual cone projection");
  Vector out(v.size());
  Index off = 0;
  for (const ConeBlock& b : blocks_) {
    auto src = v.segment(off, b.dim);
    auto dst = out.segment(off, b.dim);
    switch (b.kind) {
      case ConeKind::Zero: dst = src; break;
      case ConeKind::Free: dst.setZero(); break;
      case ConeKind::Nonneg: dst = src.cwiseMax(0.0); break;
      case ConeKind::SecondOrder: dst = project_soc(src); break;
    }
    off += b.dim;
  }
  return out;
}

double ConeSpec::dist_dual(const Vector& v) const {
  return (v - project_dual(v)).norm();
}

bool ConeSpec::in_negative_cone(const Vector& mu, double tol) const {
  require_dim(mu.size(), dim_, "cone membership");
  Index off = 0;
  for (const ConeBlock& b : blocks_) {
    auto s = mu.segment(off, b.dim);
    switch (b.kind) {
      case ConeKind::Zero:
        if (s.size() > 0 && s.cwiseAbs().maxCoeff() > tol) return false;
        break;
      case ConeKind::Free: break;
      case ConeKind::Nonneg:
        if (s.maxCoeff() > tol) return false;
        break;
      case ConeKind::SecondOrder:
        if (s.tail(b.dim - 1).norm() > -s(0) + tol) return false;
        break;
    }
    off += b.dim;
  }
  return true;
}

Vector project_box(const Vector& x, const ExtendedBox& box) {
  require_dim(x.size(), box.dim(), "box projection");
  return x.cwiseMax(box.lower()).cwiseMin(box.upper());
}

Vector project_box_restricted(const Vector& x, const ExtendedBox& box,
                              std::span<const Index> zeros) {
  Vector p = project_box(x, box);
  for (Index i : zeros) {
    if (i < 0 || i >= p.size()) {
      throw DimensionError("restricted projection: index out of range");
    }
    p(i) = 0.0;
  }
  return p;
}

Vector project_dual_cone(const Vector& v, const ConeSpec& cone) {
  return cone.project_dual(v);
}

double dist_dual_cone(const Vector& v, const ConeSpec& cone) {
  return cone.dist_dual(v);
}

ProjectedGradient pg_map(const Vector& x, const Vector& grad, double L,
                         const RestrictedBox& X) {
  if (!(L > 0.0)) throw ParameterError("pg_map: L must be positive");
  require_dim(grad.size(), x.size(), "pg_map gradient");
  ProjectedGradient out;
  out.x_plus = X.project(x - grad / L);
  out.g = L * (x - out.x_plus);
  return out;
}

}  // namespace l0iht
