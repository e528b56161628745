#include "l0iht/box.hpp"

#include <algorithm>
#include <cmath>

namespace l0iht {

ExtendedBox::ExtendedBox(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_dim(upper_.size(), lower_.size(), "box upper bound");
  for (Index i = 0; i < lower_.size(); ++i) {
    const double l = lower_(i);
    const double u = upper_(i);
    if (std::isnan(l) || std::isnan(u)) {
      throw ParameterError("box: NaN bound at index " + std::to_string(i));
    }
    if (!(l <= 0.0) || !(u >= 0.0)) {
      throw ParameterError("box: need l_i <= 0 <= u_i at index " +
                           std::to_string(i));
    }
    if (l == 0.0 && u == 0.0) pinned_.push_back(i);
  }
}

ExtendedBox ExtendedBox::unbounded(Index n) {
  return {Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
}

ExtendedBox ExtendedBox::symmetric(Index n, double radius) {
  if (!(radius >= 0.0)) throw ParameterError("box: radius must be >= 0");
  return {Vector::Constant(n, -radius), Vector::Constant(n, radius)};
}

bool ExtendedBox::bounded() const {
  return lower_.allFinite() && upper_.allFinite();
}

double ExtendedBox::radius() const {
  if (!bounded()) return kInf;
  return (-lower_).cwiseMax(upper_).norm();
}

bool ExtendedBox::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) return false;
  for (Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i))) return false;
    if (x(i) < lower_(i) - tol || x(i) > upper_(i) + tol) return false;
  }
  return true;
}

RestrictedBox::RestrictedBox(ExtendedBox box)
    : box_(std::move(box)),
      zero_mask_(static_cast<std::size_t>(box_.dim()), false) {}

RestrictedBox::RestrictedBox(ExtendedBox box, std::span<const Index> zeros)
    : RestrictedBox(std::move(box)) {
  for (Index i : zeros) {
    if (i < 0 || i >= box_.dim()) {
      throw DimensionError("restricted box: index out of range");
    }
    zero_mask_[static_cast<std::size_t>(i)] = true;
  }
}

RestrictedBox::RestrictedBox(ExtendedBox box, std::vector<bool> zero_mask)
    : box_(std::move(box)), zero_mask_(std::move(zero_mask)) {
  require_dim(static_cast<Index>(zero_mask_.size()), box_.dim(),
              "restricted box mask");
}

IndexSet RestrictedBox::zeros() const {
  IndexSet out;
  for (std::size_t i = 0; i < zero_mask_.size(); ++i) {
    if (zero_mask_[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

Vector RestrictedBox::project(const Vector& x) const {
  require_dim(x.size(), dim(), "restricted box projection");
  Vector p(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    p(i) = zero_mask_[static_cast<std::size_t>(i)]
               ? 0.0
               : std::min(std::max(x(i), box_.lower()(i)), box_.upper()(i));
  }
  return p;
}

bool RestrictedBox::contains(const Vector& x, double tol) const {
  if (!box_.contains(x, tol)) return false;
  for (Index i = 0; i < x.size(); ++i) {
    if (zero_mask_[static_cast<std::size_t>(i)] && std::abs(x(i)) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace l0iht
