#pragma once

#include "l0iht/box.hpp"
#include "l0iht/objective.hpp"
#include "l0iht/problem.hpp"

#include <functional>
#include <vector>

namespace l0iht {

struct IHTConfig {
  double L_factor = 1.1;
  bool zero_tie_to_zero = true;
  int support_stable_window = 10;
  double grad_tol = 1e-8;
  long max_outer = 100000;
};

struct VariantConfig {
  double L_min = 1e-3;
  double L_max = 1e8;
  double tau = 2.0;
  double eta = 1e-3;
  bool zero_tie_to_zero = true;
  int support_stable_window = 10;
  double grad_tol = 1e-8;
  long max_outer = 100000;
};

struct IHTTraceRow {
  long iter;
  double F;
  double dx_norm;
  double L_used;
  bool support_changed;
  int inner;
};

struct SolveReport {
  Vector x_star;
  IndexSet support_zero;  ///< exact zeros of x_star
  double F_value = 0.0;
  double f_value = 0.0;
  double F_initial = 0.0;
  long outer_iters = 0;
  long inner_iters_total = 0;
  long support_changes = 0;
  double delta = 0.0;
  SolveStatus status = SolveStatus::IterationCapped;
  std::vector<IHTTraceRow> trace;

  double L_final = 0.0;
  /// Projected-gradient norm on the final support, at the final L.
  double grad_norm = kInf;
  int max_inner_per_outer = 0;
  int inner_cap = 0;  ///< 0 for the fixed-L method
  /// Steps whose value decrease fell short of the proven bound.
  long descent_violations = 0;
};

/// One accepted step, reported to observers.
struct StepEvent {
  long k;
  const Vector& x_prev;
  const Vector& x_next;
  double F_prev;
  double F_next;
  double L;
  bool support_changed;
  int inner;
};

struct IHTHooks {
  std::function<void(const StepEvent&)> observer;
  /// Replaces the default stop rule. Called with x^k and grad f(x^k)
  /// before each step; returning true ends the run at x^k.
  std::function<bool(const Vector& x, const Vector& grad)> stop_when;
  /// Test-only fault: inverts the keep/zero comparison.
  bool invert_threshold = false;
};

/// Minimizer of L/2 (t - s)^2 + lambda [t != 0] over [l, u].
double threshold_coordinate(double s, double l, double u, double lambda,
                            double L, bool zero_tie_to_zero);

/// Applies threshold_coordinate to every entry of s.
Vector threshold_point(const Vector& s, const ExtendedBox& box, double lambda,
                       double L, bool zero_tie_to_zero);

Vector hard_threshold_step(const ObjectiveOracle& f, const Vector& x,
                           const ExtendedBox& box, double lambda, double L,
                           bool zero_tie_to_zero = true);

struct DeltaBound {
  double delta;
  Vector per_coord;  ///< +inf on pinned coordinates
};

DeltaBound delta_lower_bound(const ExtendedBox& box, double lambda, double L);

double bb_initial_L(const Vector& dx, const Vector& dg, double L_min,
                    double L_max);

/// ceil((log(L_f + eta) - log L_min) / log tau) + 2
int variant_inner_cap(double L_f, double eta, double L_min, double tau);

SolveReport iht_solve(const ObjectiveOracle& f, const ExtendedBox& box,
                      double lambda, const IHTConfig& config, const Vector& x0,
                      const IHTHooks& hooks = {});
SolveReport iht_solve(const L0Problem& problem, const IHTConfig& config,
                      const Vector& x0, const IHTHooks& hooks = {});

SolveReport iht_variant_solve(const ObjectiveOracle& f, const ExtendedBox& box,
                              double lambda, const VariantConfig& config,
                              const Vector& x0, const IHTHooks& hooks = {});
SolveReport iht_variant_solve(const L0Problem& problem,
                              const VariantConfig& config, const Vector& x0,
                              const IHTHooks& hooks = {});

struct PerturbedReport {
  SolveReport report;  ///< F_value and f_value use the unperturbed f
  double nu;
  double radius;
};

/// IHT on f + nu/2 |x|^2 with nu = eps / D^2, finished by one projected
/// gradient step on the stabilized support.
PerturbedReport solve_perturbed(const L0Problem& problem, double eps,
                                const IHTConfig& config, const Vector& x0);

}  // namespace l0iht
