#pragma once

#include "l0iht/iht_box.hpp"
#include "l0iht/iht_cone.hpp"
#include "l0iht/pg_solver.hpp"

#include <optional>
#include <string>
#include <variant>

namespace l0iht {

using AnyProblem = std::variant<L0Problem, ConeL0Problem>;

enum class SolverKind { Iht, IhtVariant, PenaltyFixed, PenaltyDynamic, Pg };

const char* to_string(SolverKind s);
SolverKind solver_from_string(const std::string& name);
bool is_cone_solver(SolverKind s);

/// Auto picks Zero for box solvers and ProjectedMinimizer for penalty
/// solvers (x = 0 is always a local minimizer of the l0 problem, so the
/// penalty solvers would stop there at once).
enum class StartPoint { Auto, Zero, ProjectedMinimizer };

const char* to_string(StartPoint s);
StartPoint start_point_from_string(const std::string& name);

struct SolverSettings {
  IHTConfig iht;
  VariantConfig variant;
  double pg_L_factor = 1.0;
  double pg_stop_grad_tol = 1e-8;
  long pg_max_iters = 100000;
  PenaltyConfig penalty;
  double penalty_eps = 1e-2;
  double penalty_t = 1.0;
  DynamicSchedule dynamic;
  StartPoint start = StartPoint::Auto;
  IHTHooks hooks;  ///< box solvers only
};

struct RunOutcome {
  SolverKind solver;
  Vector x0;
  /// For pg the report carries x, F, iteration count and status only.
  SolveReport report;
  std::optional<PGResult> pg;
  std::optional<PenaltyResult> fixed;
  std::optional<DynamicResult> dynamic;
  /// Certificate of the returned point (cone solvers).
  std::optional<Certificate> certificate;
  double feas_residual = 0.0;
  double wall_ms = 0.0;

  /// Converged, and for cone solvers the certificate holds.
  bool success() const;
};

/// Unconstrained minimizer of a quadratic objective (minimum-norm when
/// singular) projected onto the box.
Vector projected_minimizer(const SmoothObjective& f, const ExtendedBox& box);

Vector start_point(const AnyProblem& problem, SolverKind solver,
                   StartPoint start);

RunOutcome run_solver(const AnyProblem& problem, SolverKind solver,
                      const SolverSettings& settings);

}  // namespace l0iht
