#pragma once

#include "l0iht/iht_box.hpp"
#include "l0iht/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace l0iht {

/// Phi(x) = f(x) + nu/2 |x|^2 + rho/2 d_{K*}(Ax - b)^2.
class PenaltyObjective final : public ObjectiveOracle {
 public:
  PenaltyObjective(const ConeL0Problem& problem, double rho, double nu = 0.0);

  Index dim() const override { return problem_->dim(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Evaluation evaluate(const Vector& x) const override;
  /// L_f + rho |A|^2 + nu
  double lipschitz() const override { return lipschitz_; }
  double strong_modulus() const override {
    return problem_->objective.strong_modulus() + nu_;
  }

  double rho() const { return rho_; }
  double nu() const { return nu_; }
  const ConeL0Problem& problem() const { return *problem_; }

 private:
  const ConeL0Problem* problem_;
  double rho_;
  double nu_;
  double lipschitz_;
};

PenaltyObjective make_penalty(const ConeL0Problem& problem, double rho,
                              double nu = 0.0);

double choose_rho(double t, double eps, double opnorm_A);

struct RhoNu {
  double rho;
  double nu;
};
RhoNu choose_rho_nu(double t, double eps, double opnorm_A, double D);

/// mu = rho (v - Pi_{K*}(v)) with v = A x - b. Throws InvariantViolation if
/// mu leaves -K or loses complementarity.
Vector recover_multiplier(const Vector& x_plus, const ConeL0Problem& problem,
                          double rho);

struct Certificate {
  Vector x_plus;
  Vector mu;
  double feas_residual = 0.0;
  double complementarity = 0.0;
  double stationarity_residual = 0.0;
  double epsilon = 0.0;
  double comp_tol = 1e-8;
  double L_cert = 0.0;
  bool holds = false;
};

/// L_cert <= 0 selects L_f + 1.
Certificate certify_approx_local_min(const Vector& x,
                                     const ConeL0Problem& problem, double eps,
                                     double rho, double L_cert = 0.0,
                                     double comp_tol = 1e-8);

struct PenaltyConfig {
  bool use_variant = true;
  IHTConfig iht;
  VariantConfig variant;
  /// Inner stop tolerance. The theoretical value (eps/2 or eps/4) is used
  /// when this is unset or larger.
  std::optional<double> inner_grad_tol;
  double L_cert = 0.0;
  double comp_tol = 1e-8;
};

struct PenaltyResult {
  SolveReport report;  ///< F_value/f_value refer to f, not the penalty
  Certificate certificate;
  double rho = 0.0;
  double nu = 0.0;
  double L_rho = 0.0;
  double inner_tol = 0.0;
};

PenaltyResult penalty_solve_fixed(const ConeL0Problem& problem, double eps,
                                  double t, const PenaltyConfig& config,
                                  const Vector& x0);

struct DynamicSchedule {
  double rho0 = 1.0;
  double tau = 10.0;
  double t = 1.0;
  double eps_final = 1e-3;
  double eps0 = 1.0;  ///< eps_k = max(eps_final, eps0 / tau^k)
  int max_rounds = 60;
};

struct DynamicRound {
  int k;
  double rho;
  double t;
  double eps_k;
  double feas_residual;
  double grad_norm;  ///< |g(x^k; rho_k, I_k)|
  long inner_iters;
  bool retried;
  Certificate certificate;
};

struct DynamicTraceRow {
  long iter;  ///< running step count over all rounds
  int round;
  double F;  ///< penalized objective of the round
  double dx_norm;
  double L_used;
  bool support_changed;
  double rho;
  double feas_residual;
};

struct DynamicResult {
  SolveReport report;
  std::vector<DynamicRound> rounds;
  std::vector<DynamicTraceRow> trace;
  std::vector<std::string> log;
  bool certified = false;
};

double dynamic_eps(const DynamicSchedule& s, int k);

DynamicResult penalty_solve_dynamic(const ConeL0Problem& problem,
                                    const DynamicSchedule& schedule,
                                    const PenaltyConfig& config,
                                    const Vector& x0);

}  // namespace l0iht
