#include "l0iht/objective.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace l0iht {

namespace {

constexpr double kDefaultConstantTol = 1e-10;

struct PowerResult {
  double eigenvalue;
  double residual;
};

// Dominant eigenpair of a symmetric PSD operator. Convergence is declared
// on the eigen-residual |Hv - theta v| <= tol * max(theta, scale), which
// bounds the distance of theta to the spectrum. `scale` keeps the test
// attainable for shifted operators whose top eigenvalue is tiny.
PowerResult power_iteration(const std::function<Vector(const Vector&)>& apply,
                            Index n, double tol, int max_iters,
                            double scale = 0.0) {
  if (n == 0) return {0.0, 0.0};
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    // deterministic start with no special alignment to coordinate axes
    v(i) = 1.0 + 0.5 * std::sin(1.0 + 2.0 * static_cast<double>(i));
  }
  v.normalize();

  double theta = 0.0;
  double residual = kInf;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = apply(v);
    theta = v.dot(w);
    residual = (w - theta * v).norm();
    const double wn = w.norm();
    if (wn == 0.0) return {0.0, 0.0};
    if (residual <= tol * std::max(std::abs(theta), scale)) {
      return {theta, residual};
    }
    v = w / wn;
  }
  throw ConvergenceError("power iteration did not converge within " +
                             std::to_string(max_iters) + " iterations",
                         (theta + residual) * (1.0 + tol));
}

Matrix dense_hessian(const SmoothObjective& obj) {
  if (obj.kind() == SmoothObjective::Kind::LeastSquares) {
    const Matrix H = obj.matrix().transpose() * obj.matrix();
    return 0.5 * (H + H.transpose());
  }
  return obj.matrix();
}

// Used when power iteration stalls on a clustered top spectrum.
Constants dense_constants(const Matrix& H, double tol) {
  if (H.size() == 0) return {kLipschitzFloor, 0.0};
  const Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  const double slack = 1e-13 * std::max(1.0, std::abs(hi));
  const double lipschitz = std::max((hi + slack) * (1.0 + tol), kLipschitzFloor);
  return {lipschitz, std::max(0.0, (lo - slack) * (1.0 - tol))};
}

bool is_symmetric(const Matrix& Q) {
  return (Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

SmoothObjective SmoothObjective::least_squares(Matrix A, Vector b,
                                               std::optional<Constants> constants) {
  require_dim(b.size(), A.rows(), "least_squares b");
  SmoothObjective obj;
  obj.kind_ = Kind::LeastSquares;
  obj.dim_ = A.cols();
  obj.matrix_ = std::move(A);
  obj.vector_ = std::move(b);
  obj.assign_constants(constants);
  return obj;
}

SmoothObjective SmoothObjective::quadratic(Matrix Q, Vector c,
                                           std::optional<Constants> constants) {
  if (Q.rows() != Q.cols()) {
    throw DimensionError("quadratic: Q must be square");
  }
  require_dim(c.size(), Q.rows(), "quadratic c");
  if (Q.size() > 0 && !is_symmetric(Q)) {
    throw ParameterError("quadratic: Q is not symmetric");
  }
  SmoothObjective obj;
  obj.kind_ = Kind::Quadratic;
  obj.dim_ = Q.rows();
  obj.matrix_ = std::move(Q);
  obj.vector_ = std::move(c);
  obj.assign_constants(constants);
  return obj;
}

SmoothObjective SmoothObjective::perturbed(const SmoothObjective& base,
                                           double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw ParameterError("perturbed: nu must be positive and finite");
  }
  SmoothObjective obj;
  obj.kind_ = Kind::Perturbed;
  obj.dim_ = base.dim();
  obj.base_ = std::make_shared<const SmoothObjective>(base);
  obj.nu_ = nu;
  obj.lipschitz_ = base.lipschitz() + nu;
  obj.strong_modulus_ = base.strong_modulus() + nu;
  return obj;
}

void SmoothObjective::assign_constants(std::optional<Constants> constants) {
  if (kind_ == Kind::Quadratic && dim_ > 0) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw ParameterError("quadratic: Q is not positive semidefinite");
    }
  }
  Constants est;
  try {
    est = estimate_constants(*this, kDefaultConstantTol);
  } catch (const ConvergenceError&) {
    est = dense_constants(dense_hessian(*this), kDefaultConstantTol);
  }
  if (!constants) {
    lipschitz_ = est.lipschitz;
    strong_modulus_ = est.strong_modulus;
    return;
  }
  const double lam_max = est.lipschitz / (1.0 + kDefaultConstantTol);
  if (!(constants->lipschitz >= lam_max * (1.0 - 1e-8)) ||
      !(constants->lipschitz > 0.0)) {
    throw ParameterError("supplied Lipschitz constant is below the Hessian's "
                         "largest eigenvalue");
  }
  if (!(constants->strong_modulus >= 0.0)) {
    throw ParameterError("strong convexity modulus must be nonnegative");
  }
  // est.strong_modulus is a lower bound; allow the deflation margin back.
  const double lam_min_upper =
      est.strong_modulus / (1.0 - kDefaultConstantTol) +
      kDefaultConstantTol * est.lipschitz;
  if (constants->strong_modulus > lam_min_upper + 1e-8) {
    throw ParameterError("supplied strong convexity modulus exceeds the "
                         "Hessian's smallest eigenvalue");
  }
  lipschitz_ = constants->lipschitz;
  strong_modulus_ = constants->strong_modulus;
}

const SmoothObjective& SmoothObjective::base() const {
  if (!base_) throw ParameterError("objective is not a perturbation");
  return *base_;
}

double SmoothObjective::value(const Vector& x) const {
  require_dim(x.size(), dim_, "objective value");
  switch (kind_) {
    case Kind::LeastSquares:
      return 0.5 * (matrix_ * x - vector_).squaredNorm();
    case Kind::Quadratic:
      return 0.5 * x.dot(matrix_ * x) + vector_.dot(x);
    case Kind::Perturbed:
      return base_->value(x) + 0.5 * nu_ * x.squaredNorm();
  }
  return 0.0;
}

Vector SmoothObjective::gradient(const Vector& x) const {
  require_dim(x.size(), dim_, "objective gradient");
  switch (kind_) {
    case Kind::LeastSquares:
      return matrix_.transpose() * (matrix_ * x - vector_);
    case Kind::Quadratic:
      return matrix_ * x + vector_;
    case Kind::Perturbed:
      return base_->gradient(x) + nu_ * x;
  }
  return {};
}

Evaluation SmoothObjective::evaluate(const Vector& x) const {
  require_dim(x.size(), dim_, "objective evaluate");
  switch (kind_) {
    case Kind::LeastSquares: {
      const Vector r = matrix_ * x - vector_;
      return {0.5 * r.squaredNorm(), matrix_.transpose() * r};
    }
    case Kind::Quadratic: {
      const Vector qx = matrix_ * x;
      return {0.5 * x.dot(qx) + vector_.dot(x), qx + vector_};
    }
    case Kind::Perturbed: {
      Evaluation e = base_->evaluate(x);
      e.value += 0.5 * nu_ * x.squaredNorm();
      e.gradient += nu_ * x;
      return e;
    }
  }
  return {};
}

Vector SmoothObjective::hessian_times(const Vector& v) const {
  switch (kind_) {
    case Kind::LeastSquares:
      return matrix_.transpose() * (matrix_ * v);
    case Kind::Quadratic:
      return matrix_ * v;
    case Kind::Perturbed:
      return base_->hessian_times(v) + nu_ * v;
  }
  return {};
}

Constants estimate_constants(const SmoothObjective& obj, double tol,
                             int max_iters) {
  if (obj.kind() == SmoothObjective::Kind::Perturbed) {
    throw ParameterError(
        "estimate_constants: expects a least-squares or quadratic objective");
  }
  if (!(tol > 0.0) || !(tol < 1.0)) {
    throw ParameterError("estimate_constants: tol must lie in (0, 1)");
  }
  const Index n = obj.dim();
  const auto H = [&obj](const Vector& v) { return obj.hessian_times(v); };
  const PowerResult top = power_iteration(H, n, tol, max_iters);
  const double lipschitz =
      std::max((top.eigenvalue + top.residual) * (1.0 + tol), kLipschitzFloor);

  const auto shifted = [&](const Vector& v) -> Vector {
    return lipschitz * v - obj.hessian_times(v);
  };
  const PowerResult low =
      power_iteration(shifted, n, tol, max_iters, lipschitz);
  const double sigma = std::max(
      0.0, (lipschitz - low.eigenvalue - low.residual) * (1.0 - tol));
  return {lipschitz, sigma};
}

IndexSet zero_set(const Vector& x, double zero_tol) {
  IndexSet out;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) <= zero_tol) out.push_back(i);
  }
  return out;
}

Index count_nonzeros(const Vector& x, double zero_tol) {
  Index k = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > zero_tol) ++k;
  }
  return k;
}

double spectral_norm_bound(const Matrix& A, double tol, int max_iters) {
  if (A.size() == 0) return 0.0;
  const auto AtA = [&A](const Vector& v) -> Vector {
    return A.transpose() * (A * v);
  };
  try {
    const PowerResult top = power_iteration(AtA, A.cols(), tol, max_iters);
    return std::sqrt((top.eigenvalue + top.residual) * (1.0 + tol));
  } catch (const ConvergenceError&) {
    const Matrix H = A.transpose() * A;
    return std::sqrt(dense_constants(0.5 * (H + H.transpose()), tol).lipschitz);
  }
}

}  // namespace l0iht
