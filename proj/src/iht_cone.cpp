#include "l0iht/iht_cone.hpp"

#include "l0iht/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace l0iht {

PenaltyObjective::PenaltyObjective(const ConeL0Problem& problem, double rho,
                                   double nu)
    : problem_(&problem), rho_(rho), nu_(nu) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ParameterError("penalty: rho must be positive and finite");
  }
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw ParameterError("penalty: nu must be nonnegative and finite");
  }
  lipschitz_ = problem.objective.lipschitz() +
               rho * problem.opnorm_A * problem.opnorm_A + nu;
}

double PenaltyObjective::value(const Vector& x) const {
  return evaluate(x).value;
}

Vector PenaltyObjective::gradient(const Vector& x) const {
  return evaluate(x).gradient;
}

Evaluation PenaltyObjective::evaluate(const Vector& x) const {
  const ConeL0Problem& p = *problem_;
  Evaluation e = p.objective.evaluate(x);
  const Vector v = p.A * x - p.b;
  const Vector r = v - p.cone.project_dual(v);
  e.value += 0.5 * nu_ * x.squaredNorm() + 0.5 * rho_ * r.squaredNorm();
  e.gradient += nu_ * x + rho_ * (p.A.transpose() * r);
  return e;
}

PenaltyObjective make_penalty(const ConeL0Problem& problem, double rho,
                              double nu) {
  return PenaltyObjective(problem, rho, nu);
}

double choose_rho(double t, double eps, double opnorm_A) {
  if (!(t > 0.0) || !(eps > 0.0) || !(opnorm_A > 0.0)) {
    throw ParameterError("choose_rho: t, eps and |A| must be positive");
  }
  return t / eps + 1.0 / (std::sqrt(8.0) * opnorm_A);
}

RhoNu choose_rho_nu(double t, double eps, double opnorm_A, double D) {
  if (!(t > 0.0) || !(eps > 0.0) || !(opnorm_A > 0.0) || !(D > 0.0)) {
    throw ParameterError("choose_rho_nu: arguments must be positive");
  }
  if (!std::isfinite(D)) {
    throw ParameterError("choose_rho_nu: the box must be bounded");
  }
  const double root =
      std::sqrt(D) +
      std::sqrt(D + 16.0 * t + 2.0 * std::sqrt(2.0) * eps / opnorm_A);
  return {root * root / (16.0 * eps), eps / (2.0 * D)};
}

Vector recover_multiplier(const Vector& x_plus, const ConeL0Problem& problem,
                          double rho) {
  if (!(rho > 0.0)) throw ParameterError("recover_multiplier: rho must be > 0");
  const Vector v = problem.A * x_plus - problem.b;
  const Vector pv = problem.cone.project_dual(v);
  Vector mu = rho * (v - pv);
  // Rounding in v - Pi(v) is relative to |v|, not |v - Pi(v)|.
  const double scale = std::max(1.0, rho * v.norm());
  if (!problem.cone.in_negative_cone(mu, 1e-12 * scale)) {
    throw InvariantViolation("recovered multiplier is not in -K");
  }
  if (std::abs(mu.dot(pv)) > 1e-9 * std::max(1.0, scale * pv.norm())) {
    throw InvariantViolation("recovered multiplier is not complementary");
  }
  return mu;
}

Certificate certify_approx_local_min(const Vector& x,
                                     const ConeL0Problem& problem, double eps,
                                     double rho, double L_cert,
                                     double comp_tol) {
  require_dim(x.size(), problem.dim(), "certificate point");
  if (!(eps > 0.0)) throw ParameterError("certificate: eps must be > 0");
  Certificate c;
  c.x_plus = x;
  c.epsilon = eps;
  c.comp_tol = comp_tol;
  c.L_cert = L_cert > 0.0 ? L_cert : problem.objective.lipschitz() + 1.0;
  c.mu = recover_multiplier(x, problem, rho);

  const Vector v = problem.A * x - problem.b;
  const Vector pv = problem.cone.project_dual(v);
  c.feas_residual = (v - pv).norm();
  c.complementarity = std::abs(c.mu.dot(pv));

  const Vector w = problem.objective.gradient(x) + problem.A.transpose() * c.mu;
  const RestrictedBox X(problem.box, zero_set(x, 0.0));
  c.stationarity_residual = pg_map(x, w, c.L_cert, X).g.norm();
  c.holds = c.feas_residual <= eps && c.complementarity <= comp_tol &&
            c.stationarity_residual <= eps;
  return c;
}

namespace {

SolveReport run_inner(const ObjectiveOracle& phi, const ConeL0Problem& problem,
                      const PenaltyConfig& config, std::optional<double> tol,
                      const Vector& x0, const IHTHooks& hooks) {
  if (config.use_variant) {
    VariantConfig vc = config.variant;
    if (tol) vc.grad_tol = std::min(vc.grad_tol, *tol);
    return iht_variant_solve(phi, problem.box, problem.lambda, vc, x0, hooks);
  }
  IHTConfig ic = config.iht;
  if (tol) ic.grad_tol = std::min(ic.grad_tol, *tol);
  return iht_solve(phi, problem.box, problem.lambda, ic, x0, hooks);
}

void refer_to_f(SolveReport& rep, const ConeL0Problem& problem) {
  rep.support_zero = zero_set(rep.x_star, 0.0);
  rep.f_value = problem.objective.value(rep.x_star);
  rep.F_value = l0_value(rep.f_value, rep.x_star, problem.lambda);
}

}  // namespace

PenaltyResult penalty_solve_fixed(const ConeL0Problem& problem, double eps,
                                  double t, const PenaltyConfig& config,
                                  const Vector& x0) {
  if (!(eps > 0.0)) throw ParameterError("penalty: eps must be > 0");
  if (!(t > 0.0)) throw ParameterError("penalty: t must be > 0");
  PenaltyResult out;
  double derived_tol;
  if (problem.objective.strong_modulus() > 0.0) {
    out.rho = choose_rho(t, eps, problem.opnorm_A);
    out.nu = 0.0;
    derived_tol = eps / 2.0;  // sqrt(2 L xi) with xi = eps^2 / (8 L)
  } else if (problem.box.bounded()) {
    const RhoNu rn =
        choose_rho_nu(t, eps, problem.opnorm_A, problem.box.radius());
    out.rho = rn.rho;
    out.nu = rn.nu;
    derived_tol = eps / 4.0;  // sqrt(2 L xi) with xi = eps^2 / (32 L)
  } else {
    throw UnsupportedProblem(
        "penalty: need a strongly convex objective or a bounded box");
  }
  out.inner_tol = config.inner_grad_tol
                      ? std::min(*config.inner_grad_tol, derived_tol)
                      : derived_tol;

  const PenaltyObjective phi(problem, out.rho, out.nu);
  out.L_rho = phi.lipschitz();
  SolveReport rep = run_inner(phi, problem, config, out.inner_tol, x0, {});

  const RestrictedBox X(problem.box, zero_set(rep.x_star, 0.0));
  rep.x_star = pg_map(rep.x_star, phi.gradient(rep.x_star), out.L_rho, X).x_plus;
  refer_to_f(rep, problem);
  out.certificate = certify_approx_local_min(rep.x_star, problem, eps, out.rho,
                                             config.L_cert, config.comp_tol);
  out.report = std::move(rep);
  return out;
}

double dynamic_eps(const DynamicSchedule& s, int k) {
  return std::max(s.eps_final, s.eps0 * std::pow(s.tau, -k));
}

DynamicResult penalty_solve_dynamic(const ConeL0Problem& problem,
                                    const DynamicSchedule& schedule,
                                    const PenaltyConfig& config,
                                    const Vector& x0) {
  if (!(schedule.rho0 > 0.0)) throw ParameterError("dynamic: rho0 must be > 0");
  if (!(schedule.tau > 1.0)) throw ParameterError("dynamic: tau must be > 1");
  if (!(schedule.t > 0.0)) throw ParameterError("dynamic: t must be > 0");
  if (!(schedule.eps_final > 0.0) || !(schedule.eps0 > 0.0)) {
    throw ParameterError("dynamic: eps values must be > 0");
  }
  if (schedule.max_rounds < 1) {
    throw ParameterError("dynamic: max_rounds must be >= 1");
  }
  if (!problem.box.contains(x0)) {
    throw ParameterError("dynamic: x0 must lie in the box");
  }

  DynamicResult out;
  Vector x = x0;
  double rho = schedule.rho0;
  double t = schedule.t;
  long outer_total = 0;
  long inner_total = 0;
  long changes_total = 0;
  for (int k = 0; k < schedule.max_rounds; ++k) {
    const double eps_k = dynamic_eps(schedule, k);
    const PenaltyObjective phi(problem, rho, 0.0);
    const double L_rho = phi.lipschitz();
    double last_gn = kInf;
    if (k == 0) {
      out.trace.push_back({0, 0, phi.value(x) + problem.lambda * count_nonzeros(x),
                           0.0, L_rho, false, rho, problem.infeasibility(x)});
    }
    IHTHooks hooks;
    hooks.observer = [&](const StepEvent& e) {
      out.trace.push_back({static_cast<long>(out.trace.size()), k, e.F_next,
                           (e.x_next - e.x_prev).norm(), e.L,
                           e.support_changed, rho,
                           problem.infeasibility(e.x_next)});
    };
    hooks.stop_when = [&](const Vector& z, const Vector& grad) {
      if (problem.infeasibility(z) > t / rho) return false;
      const RestrictedBox X(problem.box, zero_set(z, 0.0));
      last_gn = pg_map(z, grad, L_rho, X).g.norm();
      return last_gn <= std::min(1.0, L_rho) * eps_k;
    };

    SolveReport rep = run_inner(phi, problem, config, std::nullopt, x, hooks);
    bool retried = false;
    if (rep.status != SolveStatus::Converged) {
      out.log.push_back("round " + std::to_string(k) +
                        ": inner stall, doubling t from " + std::to_string(t));
      t *= 2.0;
      retried = true;
      rep = run_inner(phi, problem, config, std::nullopt, x, hooks);
      if (rep.status != SolveStatus::Converged) {
        throw ConvergenceError("dynamic penalty: inner solve stalled twice",
                               problem.infeasibility(rep.x_star));
      }
    }
    x = rep.x_star;
    outer_total += rep.outer_iters;
    inner_total += rep.inner_iters_total;
    changes_total += rep.support_changes;

    DynamicRound round{k,
                       rho,
                       t,
                       eps_k,
                       problem.infeasibility(x),
                       last_gn,
                       rep.outer_iters,
                       retried,
                       certify_approx_local_min(x, problem, schedule.eps_final,
                                                rho, config.L_cert,
                                                config.comp_tol)};
    const bool holds = round.certificate.holds;
    out.rounds.push_back(std::move(round));
    out.report = std::move(rep);
    if (holds) {
      out.certified = true;
      break;
    }
    rho *= schedule.tau;
  }
  out.report.outer_iters = outer_total;
  out.report.inner_iters_total = inner_total;
  out.report.support_changes = changes_total;
  out.report.status =
      out.certified ? SolveStatus::Converged : SolveStatus::IterationCapped;
  refer_to_f(out.report, problem);
  return out;
}

}  // namespace l0iht
