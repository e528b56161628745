#pragma once

#include "l0iht/types.hpp"

#include <memory>
#include <optional>

namespace l0iht {

struct Evaluation {
  double value;
  Vector gradient;
};

/// Smooth convex function with a known gradient Lipschitz constant.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Evaluation evaluate(const Vector& x) const {
    return {value(x), gradient(x)};
  }
  virtual double lipschitz() const = 0;
  /// Strong convexity modulus; 0 when the function is merely convex.
  virtual double strong_modulus() const = 0;
};

struct Constants {
  double lipschitz;
  double strong_modulus;
};

/// Smallest Lipschitz constant handed out; keeps 1/L finite for linear f.
inline constexpr double kLipschitzFloor = 1e-12;

/// Concrete smooth objectives:
///   LeastSquares  f(x) = 1/2 |A x - b|^2
///   Quadratic     f(x) = 1/2 x'Qx + c'x
///   Perturbed     f(x) = g(x) + nu/2 |x|^2
///
/// Instances are immutable. When constants are not supplied they are
/// estimated with `estimate_constants`; supplied constants are validated
/// against the same estimate.
class SmoothObjective final : public ObjectiveOracle {
 public:
  enum class Kind { LeastSquares, Quadratic, Perturbed };

  static SmoothObjective least_squares(Matrix A, Vector b,
                                       std::optional<Constants> constants = {});
  static SmoothObjective quadratic(Matrix Q, Vector c,
                                   std::optional<Constants> constants = {});
  static SmoothObjective perturbed(const SmoothObjective& base, double nu);

  Kind kind() const { return kind_; }
  /// A for least squares, Q for quadratics. Empty for Perturbed.
  const Matrix& matrix() const { return matrix_; }
  /// b for least squares, c for quadratics. Empty for Perturbed.
  const Vector& vector() const { return vector_; }
  const SmoothObjective& base() const;
  double nu() const { return nu_; }

  Index dim() const override { return dim_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Evaluation evaluate(const Vector& x) const override;
  double lipschitz() const override { return lipschitz_; }
  double strong_modulus() const override { return strong_modulus_; }

  /// Hessian-vector product.
  Vector hessian_times(const Vector& v) const;

 private:
  SmoothObjective() = default;
  void assign_constants(std::optional<Constants> constants);

  Kind kind_ = Kind::Quadratic;
  Index dim_ = 0;
  Matrix matrix_;
  Vector vector_;
  std::shared_ptr<const SmoothObjective> base_;
  double nu_ = 0.0;
  double lipschitz_ = 0.0;
  double strong_modulus_ = 0.0;
};

/// Power-iteration bounds on the Hessian spectrum of a least-squares or
/// quadratic objective.
///
/// L_f is (theta + |r|)(1 + tol) where theta is the converged Rayleigh
/// quotient and r its residual. sigma comes from the same iteration on
/// L_f I - H, is reduced by the residual, deflated by (1 - tol) and floored
/// at 0. Throws ConvergenceError (carrying the best bound so far) when the
/// residual does not drop below tol * theta within max_iters.
Constants estimate_constants(const SmoothObjective& obj, double tol,
                             int max_iters = 200000);

/// Zero set I(x) = {i : |x_i| <= zero_tol}.
IndexSet zero_set(const Vector& x, double zero_tol = 0.0);

/// Number of entries with |x_i| > zero_tol.
Index count_nonzeros(const Vector& x, double zero_tol = 0.0);

/// Largest singular value of A (upper bound, power iteration on A'A).
double spectral_norm_bound(const Matrix& A, double tol = 1e-10,
                           int max_iters = 200000);

}  // namespace l0iht
