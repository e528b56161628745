#include "l0iht/problem.hpp"

#include <cmath>

namespace l0iht {

double l0_value(double f_value, const Vector& x, double lambda) {
  return f_value + lambda * static_cast<double>(count_nonzeros(x, 0.0));
}

L0Problem::L0Problem(SmoothObjective obj, ExtendedBox b, double lam)
    : objective(std::move(obj)), box(std::move(b)), lambda(lam) {
  require_dim(objective.dim(), box.dim(), "objective vs box");
  // lambda = 0 is accepted: it reduces IHT to projected gradient.
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be finite and nonnegative");
  }
}

double L0Problem::value(const Vector& x) const {
  return l0_value(objective.value(x), x, lambda);
}

ConeL0Problem::ConeL0Problem(SmoothObjective obj, ExtendedBox bx, double lam,
                             Matrix a, Vector bv, ConeSpec k, double opnorm)
    : objective(std::move(obj)),
      box(std::move(bx)),
      lambda(lam),
      A(std::move(a)),
      b(std::move(bv)),
      cone(std::move(k)),
      opnorm_A(opnorm) {
  require_dim(objective.dim(), box.dim(), "objective vs box");
  require_dim(A.cols(), box.dim(), "constraint matrix columns");
  require_dim(b.size(), A.rows(), "constraint right-hand side");
  require_dim(cone.dim(), A.rows(), "cone dimension");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("lambda must be finite and nonnegative");
  }
  const double est = spectral_norm_bound(A);
  if (opnorm_A <= 0.0) {
    opnorm_A = est;
  } else if (opnorm_A < est / (1.0 + 1e-10) * (1.0 - 1e-8)) {
    throw ParameterError("opnorm_A is below the spectral norm of A");
  }
  if (!(opnorm_A > 0.0)) {
    throw ParameterError("constraint matrix must be nonzero");
  }
}

double ConeL0Problem::infeasibility(const Vector& x) const {
  return cone.dist_dual(A * x - b);
}

}  // namespace l0iht
