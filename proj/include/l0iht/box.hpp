#pragma once

#include "l0iht/types.hpp"

#include <span>

namespace l0iht {

/// Box {x : l <= x <= u} with l in [-inf, 0]^n and u in [0, +inf]^n.
/// Infinite bounds are stored as IEEE infinities.
class ExtendedBox {
 public:
  ExtendedBox() = default;
  ExtendedBox(Vector lower, Vector upper);

  static ExtendedBox unbounded(Index n);
  static ExtendedBox symmetric(Index n, double radius);

  Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  /// I0 = {i : l_i = u_i = 0}; such coordinates are always zero.
  const IndexSet& pinned() const { return pinned_; }
  bool is_pinned(Index i) const { return lower_(i) == 0.0 && upper_(i) == 0.0; }

  bool bounded() const;
  /// D = max{|x| : x in box}; +inf for unbounded boxes.
  double radius() const;
  bool contains(const Vector& x, double tol = 0.0) const;

 private:
  Vector lower_;
  Vector upper_;
  IndexSet pinned_;
};

/// The restricted box B_I = {x in B : x_I = 0}.
class RestrictedBox {
 public:
  RestrictedBox() = default;
  explicit RestrictedBox(ExtendedBox box);
  RestrictedBox(ExtendedBox box, std::span<const Index> zeros);
  RestrictedBox(ExtendedBox box, std::vector<bool> zero_mask);

  Index dim() const { return box_.dim(); }
  const ExtendedBox& box() const { return box_; }
  const std::vector<bool>& zero_mask() const { return zero_mask_; }
  IndexSet zeros() const;

  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol = 0.0) const;

 private:
  ExtendedBox box_;
  std::vector<bool> zero_mask_;
};

}  // namespace l0iht
