#pragma once

#include "l0iht/box.hpp"
#include "l0iht/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace l0iht {

/// Primitive cone kinds making up K. Their duals: Zero* = Free,
/// Free* = Zero; Nonneg and SecondOrder are self-dual.
enum class ConeKind { Zero, Free, Nonneg, SecondOrder };

const char* to_string(ConeKind kind);
ConeKind cone_kind_from_string(const std::string& name);

struct ConeBlock {
  ConeKind kind;
  Index dim;
};

/// K as an ordered product of primitive cones. A SecondOrder block of
/// dimension k is {(t, z) in R x R^{k-1} : |z| <= t}.
class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<ConeBlock> blocks);

  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  Index dim() const { return dim_; }

  /// Projection onto K* (blockwise).
  Vector project_dual(const Vector& v) const;
  /// d_{K*}(v).
  double dist_dual(const Vector& v) const;
  /// Membership of mu in -K, blockwise, with absolute tolerance.
  bool in_negative_cone(const Vector& mu, double tol) const;

 private:
  std::vector<ConeBlock> blocks_;
  Index dim_ = 0;
};

Vector project_box(const Vector& x, const ExtendedBox& box);
Vector project_box_restricted(const Vector& x, const ExtendedBox& box,
                              std::span<const Index> zeros);

/// Projection onto the second-order cone {(t, z) : |z| <= t}.
Vector project_soc(const Vector& v);

Vector project_dual_cone(const Vector& v, const ConeSpec& cone);
double dist_dual_cone(const Vector& v, const ConeSpec& cone);

struct ProjectedGradient {
  Vector g;       ///< L (x - x_plus)
  Vector x_plus;  ///< Pi_X(x - grad / L)
};

/// Projected-gradient map of a smooth function over a restricted box.
ProjectedGradient pg_map(const Vector& x, const Vector& grad, double L,
                         const RestrictedBox& X);

}  // namespace l0iht
