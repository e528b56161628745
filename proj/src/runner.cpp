#include "l0iht/runner.hpp"

#include <Eigen/QR>
#include <chrono>

namespace l0iht {

const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Iht: return "iht";
    case SolverKind::IhtVariant: return "iht-variant";
    case SolverKind::PenaltyFixed: return "penalty-fixed";
    case SolverKind::PenaltyDynamic: return "penalty-dynamic";
    case SolverKind::Pg: return "pg";
  }
  return "?";
}

SolverKind solver_from_string(const std::string& name) {
  for (SolverKind s : {SolverKind::Iht, SolverKind::IhtVariant,
                       SolverKind::PenaltyFixed, SolverKind::PenaltyDynamic,
                       SolverKind::Pg}) {
    if (name == to_string(s)) return s;
  }
  throw ParameterError("unknown solver '" + name + "'");
}

bool is_cone_solver(SolverKind s) {
  return s == SolverKind::PenaltyFixed || s == SolverKind::PenaltyDynamic;
}

const char* to_string(StartPoint s) {
  switch (s) {
    case StartPoint::Auto: return "auto";
    case StartPoint::Zero: return "zero";
    case StartPoint::ProjectedMinimizer: return "projected-minimizer";
  }
  return "?";
}

StartPoint start_point_from_string(const std::string& name) {
  for (StartPoint s :
       {StartPoint::Auto, StartPoint::Zero, StartPoint::ProjectedMinimizer}) {
    if (name == to_string(s)) return s;
  }
  throw ParameterError("unknown start point '" + name + "'");
}

bool RunOutcome::success() const {
  if (report.status != SolveStatus::Converged) return false;
  return !certificate || certificate->holds;
}

Vector projected_minimizer(const SmoothObjective& f, const ExtendedBox& box) {
  const Index n = f.dim();
  Matrix H(n, n);
  for (Index j = 0; j < n; ++j) H.col(j) = f.hessian_times(Vector::Unit(n, j));
  const Vector g0 = f.gradient(Vector::Zero(n));
  const Vector x = Eigen::CompleteOrthogonalDecomposition<Matrix>(H).solve(-g0);
  return project_box(x, box);
}

Vector start_point(const AnyProblem& problem, SolverKind solver,
                   StartPoint start) {
  if (start == StartPoint::Auto) {
    start = is_cone_solver(solver) ? StartPoint::ProjectedMinimizer
                                   : StartPoint::Zero;
  }
  return std::visit(
      [&](const auto& p) -> Vector {
        if (start == StartPoint::Zero) return Vector::Zero(p.dim());
        return projected_minimizer(p.objective, p.box);
      },
      problem);
}

namespace {

const L0Problem& box_problem(const AnyProblem& problem, SolverKind s) {
  if (const auto* p = std::get_if<L0Problem>(&problem)) return *p;
  throw ParameterError(std::string("solver '") + to_string(s) +
                       "' needs a problem without cone constraints");
}

const ConeL0Problem& cone_problem(const AnyProblem& problem, SolverKind s) {
  if (const auto* p = std::get_if<ConeL0Problem>(&problem)) return *p;
  throw ParameterError(std::string("solver '") + to_string(s) +
                       "' needs a cone-constrained problem");
}

}  // namespace

RunOutcome run_solver(const AnyProblem& problem, SolverKind solver,
                      const SolverSettings& st) {
  RunOutcome out;
  out.solver = solver;
  out.x0 = start_point(problem, solver, st.start);
  const auto t0 = std::chrono::steady_clock::now();
  switch (solver) {
    case SolverKind::Iht:
      out.report = iht_solve(box_problem(problem, solver), st.iht, out.x0,
                             st.hooks);
      break;
    case SolverKind::IhtVariant:
      out.report = iht_variant_solve(box_problem(problem, solver), st.variant,
                                     out.x0, st.hooks);
      break;
    case SolverKind::Pg: {
      const L0Problem& p = box_problem(problem, solver);
      PGConfig cfg;
      cfg.L = st.pg_L_factor * p.objective.lipschitz();
      cfg.stop_grad_tol = st.pg_stop_grad_tol;
      cfg.max_iters = st.pg_max_iters;
      cfg.strong_modulus_hint = p.objective.strong_modulus();
      PGResult r = pg_solve(p.objective, RestrictedBox(p.box), cfg, out.x0);
      SolveReport& rep = out.report;
      rep.x_star = r.x;
      rep.support_zero = zero_set(r.x, 0.0);
      rep.f_value = r.value;
      rep.F_value = l0_value(r.value, r.x, p.lambda);
      rep.F_initial = p.value(out.x0);
      rep.outer_iters = r.iters;
      rep.status = r.status;
      rep.L_final = cfg.L;
      rep.grad_norm = r.gnorm;
      out.pg = std::move(r);
      break;
    }
    case SolverKind::PenaltyFixed: {
      const ConeL0Problem& p = cone_problem(problem, solver);
      PenaltyResult r = penalty_solve_fixed(p, st.penalty_eps, st.penalty_t,
                                            st.penalty, out.x0);
      out.report = r.report;
      out.certificate = r.certificate;
      out.fixed = std::move(r);
      break;
    }
    case SolverKind::PenaltyDynamic: {
      const ConeL0Problem& p = cone_problem(problem, solver);
      DynamicResult r =
          penalty_solve_dynamic(p, st.dynamic, st.penalty, out.x0);
      out.report = r.report;
      if (!r.rounds.empty()) out.certificate = r.rounds.back().certificate;
      out.dynamic = std::move(r);
      break;
    }
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  if (const auto* p = std::get_if<ConeL0Problem>(&problem)) {
    out.feas_residual = p->infeasibility(out.report.x_star);
  }
  return out;
}

}  // namespace l0iht
