#pragma once

#include "l0iht/box.hpp"
#include "l0iht/geometry.hpp"
#include "l0iht/objective.hpp"

namespace l0iht {

/// min f(x) + lambda |x|_0 over the box.
struct L0Problem {
  SmoothObjective objective;
  ExtendedBox box;
  double lambda;

  L0Problem(SmoothObjective objective, ExtendedBox box, double lambda);

  Index dim() const { return box.dim(); }
  /// F(x) with exact zero counting.
  double value(const Vector& x) const;
};

/// min f(x) + lambda |x|_0 over the box subject to Ax - b in K*.
struct ConeL0Problem {
  SmoothObjective objective;
  ExtendedBox box;
  double lambda;
  Matrix A;
  Vector b;
  ConeSpec cone;
  double opnorm_A;

  /// opnorm_A <= 0 means "compute it".
  ConeL0Problem(SmoothObjective objective, ExtendedBox box, double lambda,
                Matrix A, Vector b, ConeSpec cone, double opnorm_A = 0.0);

  Index dim() const { return box.dim(); }
  Index rows() const { return A.rows(); }
  /// d_{K*}(Ax - b).
  double infeasibility(const Vector& x) const;
  L0Problem box_part() const { return {objective, box, lambda}; }
};

/// F(x) = value + lambda * (number of nonzero entries).
double l0_value(double f_value, const Vector& x, double lambda);

}  // namespace l0iht
