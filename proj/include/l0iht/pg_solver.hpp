#pragma once

#include "l0iht/box.hpp"
#include "l0iht/objective.hpp"

#include <optional>
#include <vector>

namespace l0iht {

struct PGConfig {
  double L = 0.0;  ///< step constant; must satisfy L >= L_phi
  double stop_grad_tol = 1e-8;
  long max_iters = 100000;
  double strong_modulus_hint = 0.0;
  /// Value-gap target. With strong_modulus_hint > 0 the solver also stops
  /// once the gap is certified below it, and never runs past the
  /// strongly convex iteration budget.
  std::optional<double> target_gap;
  /// Known optimal value, sharpens the budget when supplied.
  std::optional<double> optimal_value;
};

struct PGTraceRow {
  long iter;
  double value;
  double gnorm;
};

enum class PGStop { GradTol, GapCertified, Budget, Cap };

struct PGResult {
  Vector x;
  double value = 0.0;
  double gnorm = 0.0;
  long iters = 0;
  SolveStatus status = SolveStatus::IterationCapped;
  PGStop stop = PGStop::Cap;
  std::optional<long> budget;
  std::vector<PGTraceRow> trace;
};

/// Pi_X(x - grad phi(x) / L).
Vector pg_step(const ObjectiveOracle& phi, const Vector& x, double L,
               const RestrictedBox& X);

PGResult pg_solve(const ObjectiveOracle& phi, const RestrictedBox& X,
                  const PGConfig& config, const Vector& x0);

/// 2 ceil(L/sigma) ceil(log2(gap0/eps)) + 1; 1 when gap0 <= eps.
long pg_iteration_budget(double L, double sigma, double gap0, double eps);

struct StationarityCertificate {
  bool holds;
  double g_norm;
  Vector x_plus;
};

StationarityCertificate certify_stationarity(const ObjectiveOracle& phi,
                                             const Vector& x, double L,
                                             const RestrictedBox& X,
                                             double eps);

}  // namespace l0iht
