#include "l0iht/pg_solver.hpp"

#include "l0iht/geometry.hpp"

#include <cmath>

namespace l0iht {

Vector pg_step(const ObjectiveOracle& phi, const Vector& x, double L,
               const RestrictedBox& X) {
  return pg_map(x, phi.gradient(x), L, X).x_plus;
}

long pg_iteration_budget(double L, double sigma, double gap0, double eps) {
  if (!(L > 0.0) || !(sigma > 0.0) || !(eps > 0.0)) {
    throw ParameterError("pg budget: L, sigma and eps must be positive");
  }
  if (gap0 <= eps) return 1;
  const double m = std::ceil(L / sigma);
  const double halvings = std::ceil(std::log2(gap0 / eps));
  return static_cast<long>(2.0 * m * halvings + 1.0);
}

PGResult pg_solve(const ObjectiveOracle& phi, const RestrictedBox& X,
                  const PGConfig& config, const Vector& x0) {
  require_dim(x0.size(), phi.dim(), "pg_solve x0");
  require_dim(X.dim(), phi.dim(), "pg_solve feasible set");
  const double L = config.L;
  if (!(L > 0.0) || L < phi.lipschitz() * (1.0 - 1e-8)) {
    throw ParameterError("pg_solve: L must be at least the Lipschitz constant");
  }
  if (config.max_iters < 1) throw ParameterError("pg_solve: max_iters >= 1");
  if (!(config.stop_grad_tol >= 0.0)) {
    throw ParameterError("pg_solve: stop_grad_tol must be nonnegative");
  }
  if (!X.contains(x0, 1e-12)) {
    throw ParameterError("pg_solve: x0 is not in the feasible set");
  }
  const double sigma = config.strong_modulus_hint;
  const bool gap_mode = config.target_gap.has_value() && sigma > 0.0;
  if (config.target_gap && !(*config.target_gap > 0.0)) {
    throw ParameterError("pg_solve: target gap must be positive");
  }

  PGResult r;
  Vector x = x0;
  double prev_gnorm = kInf;
  for (long k = 0;; ++k) {
    const Evaluation e = phi.evaluate(x);
    const ProjectedGradient pg = pg_map(x, e.gradient, L, X);
    const double gn = pg.g.norm();
    r.trace.push_back({k, e.value, gn});
    r.x = x;
    r.value = e.value;
    r.gnorm = gn;
    r.iters = k;

    if (gn <= config.stop_grad_tol) {
      r.status = SolveStatus::Converged;
      r.stop = PGStop::GradTol;
      return r;
    }
    if (gap_mode) {
      if (k == 0) {
        double gap0;
        if (config.optimal_value) {
          gap0 = e.value - *config.optimal_value;
        } else {
          // phi(x1) - phi* <= 2 |g(x0)|^2 / sigma
          gap0 = e.value - phi.value(pg.x_plus) + 2.0 * gn * gn / sigma;
        }
        r.budget = pg_iteration_budget(L, sigma, std::max(gap0, 0.0),
                                       *config.target_gap);
      } else if (2.0 * prev_gnorm * prev_gnorm / sigma <=
                 *config.target_gap) {
        r.status = SolveStatus::Converged;
        r.stop = PGStop::GapCertified;
        return r;
      }
      if (k >= *r.budget) {
        r.status = SolveStatus::Converged;
        r.stop = PGStop::Budget;
        return r;
      }
    }
    if (k >= config.max_iters) {
      r.status = SolveStatus::IterationCapped;
      r.stop = PGStop::Cap;
      return r;
    }
    prev_gnorm = gn;
    x = pg.x_plus;
  }
}

StationarityCertificate certify_stationarity(const ObjectiveOracle& phi,
                                             const Vector& x, double L,
                                             const RestrictedBox& X,
                                             double eps) {
  ProjectedGradient pg = pg_map(x, phi.gradient(x), L, X);
  const double gn = pg.g.norm();
  return {gn <= eps, gn, std::move(pg.x_plus)};
}

}  // namespace l0iht
