#include "l0iht/iht_box.hpp"

#include "l0iht/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace l0iht {

double threshold_coordinate(double s, double l, double u, double lambda,
                            double L, bool zero_tie_to_zero) {
  const double p = std::min(std::max(s, l), u);
  const double gain = s * s - (p - s) * (p - s);
  const double thr = 2.0 * lambda / L;
  if (gain > thr) return p;
  if (gain < thr) return 0.0;
  return zero_tie_to_zero ? 0.0 : p;
}

Vector threshold_point(const Vector& s, const ExtendedBox& box, double lambda,
                       double L, bool zero_tie_to_zero) {
  require_dim(s.size(), box.dim(), "threshold point");
  Vector out(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    out(i) = threshold_coordinate(s(i), box.lower()(i), box.upper()(i), lambda,
                                  L, zero_tie_to_zero);
  }
  return out;
}

Vector hard_threshold_step(const ObjectiveOracle& f, const Vector& x,
                           const ExtendedBox& box, double lambda, double L,
                           bool zero_tie_to_zero) {
  if (!(L > 0.0)) throw ParameterError("hard_threshold_step: L must be > 0");
  require_dim(x.size(), box.dim(), "hard_threshold_step x");
  return threshold_point(x - f.gradient(x) / L, box, lambda, L,
                         zero_tie_to_zero);
}

DeltaBound delta_lower_bound(const ExtendedBox& box, double lambda, double L) {
  if (!(lambda > 0.0)) throw ParameterError("delta: lambda must be > 0");
  if (!(L > 0.0)) throw ParameterError("delta: L must be > 0");
  const double root = std::sqrt(2.0 * lambda / L);
  DeltaBound out{kInf, Vector::Constant(box.dim(), kInf)};
  for (Index i = 0; i < box.dim(); ++i) {
    const double l = box.lower()(i);
    const double u = box.upper()(i);
    if (l == 0.0 && u == 0.0) continue;
    double d = root;
    if (l == 0.0) {
      d = std::min(d, u);
    } else if (u == 0.0) {
      d = std::min(d, -l);
    } else {
      d = std::min({d, -l, u});
    }
    out.per_coord(i) = d;
    out.delta = std::min(out.delta, d);
  }
  return out;
}

double bb_initial_L(const Vector& dx, const Vector& dg, double L_min,
                    double L_max) {
  require_dim(dg.size(), dx.size(), "bb_initial_L");
  const double nx = dx.squaredNorm();
  if (nx == 0.0) return L_min;
  const double q = dg.dot(dx) / nx;
  if (!std::isfinite(q)) return L_min;
  return std::max(L_min, std::min(L_max, q));
}

int variant_inner_cap(double L_f, double eta, double L_min, double tau) {
  const double v = std::ceil((std::log(L_f + eta) - std::log(L_min)) /
                             std::log(tau)) + 2.0;
  return static_cast<int>(std::max(v, 1.0));
}

namespace {

bool same_zero_pattern(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if ((a(i) == 0.0) != (b(i) == 0.0)) return false;
  }
  return true;
}

struct Step {
  Vector x;
  Evaluation e;
  double F;
  double L;
  int inner;
};

// Shared outer loop. `propose` computes the accepted step from x^k.
template <class Propose>
SolveReport run_iht(const ObjectiveOracle& f, const ExtendedBox& box,
                    double lambda, const Vector& x0, int window,
                    double grad_tol, long max_outer, double cert_L_floor,
                    double descent_modulus, const IHTHooks& hooks,
                    Propose&& propose) {
  require_dim(f.dim(), box.dim(), "objective vs box");
  require_dim(x0.size(), box.dim(), "x0");
  if (!box.contains(x0)) throw ParameterError("x0 must lie in the box");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (window < 1) throw ParameterError("support_stable_window must be >= 1");
  if (!(grad_tol >= 0.0)) throw ParameterError("grad_tol must be >= 0");
  if (max_outer < 1) throw ParameterError("max_outer must be >= 1");

  SolveReport rep;
  Vector x = x0;
  Evaluation e = f.evaluate(x);
  double F = l0_value(e.value, x, lambda);
  rep.F_initial = F;
  rep.trace.push_back({0, F, 0.0, 0.0, false, 0});

  int stable = 0;
  long k = 0;
  auto finish = [&](SolveStatus status) {
    rep.x_star = x;
    rep.support_zero = zero_set(x, 0.0);
    rep.f_value = e.value;
    rep.F_value = F;
    rep.outer_iters = k;
    rep.status = status;
    return rep;
  };

  for (;; ++k) {
    if (hooks.stop_when && hooks.stop_when(x, e.gradient)) {
      return finish(SolveStatus::Converged);
    }
    Step st = propose(k, x, e, F);
    rep.inner_iters_total += st.inner;
    rep.max_inner_per_outer = std::max(rep.max_inner_per_outer, st.inner);
    rep.L_final = st.L;

    const double dx = (st.x - x).norm();
    const bool changed = !same_zero_pattern(x, st.x);
    if (!changed) {
      // With a fixed zero pattern the step is a projected gradient step on
      // B_I, so L * |dx| is the projected-gradient norm at x^k.
      const double gn = std::max(st.L, cert_L_floor) * dx;
      rep.grad_norm = gn;
      if (!hooks.stop_when && (dx == 0.0 || (stable + 1 >= window &&
                                             gn <= grad_tol))) {
        return finish(SolveStatus::Converged);
      }
    }
    if (k >= max_outer) return finish(SolveStatus::IterationCapped);

    const double slack = 1e-10 * std::max(1.0, std::abs(F));
    if (F - st.F < 0.5 * descent_modulus * dx * dx - slack) {
      ++rep.descent_violations;
    }
    if (hooks.observer) {
      hooks.observer(StepEvent{k, x, st.x, F, st.F, st.L, changed, st.inner});
    }
    rep.trace.push_back({k + 1, st.F, dx, st.L, changed, st.inner});
    if (changed) {
      ++rep.support_changes;
      stable = 0;
      rep.grad_norm = kInf;
    } else {
      ++stable;
    }
    x = std::move(st.x);
    e = std::move(st.e);
    F = st.F;
  }
}

Vector threshold_from(const Vector& x, const Vector& grad,
                      const ExtendedBox& box, double lambda, double L,
                      bool tie_zero, bool invert) {
  const Vector s = x - grad / L;
  if (!invert) return threshold_point(s, box, lambda, L, tie_zero);
  Vector out(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    const double kept = threshold_coordinate(s(i), box.lower()(i),
                                             box.upper()(i), 0.0, L, false);
    const double chosen = threshold_coordinate(
        s(i), box.lower()(i), box.upper()(i), lambda, L, tie_zero);
    out(i) = chosen == 0.0 ? kept : 0.0;
  }
  return out;
}

}  // namespace

SolveReport iht_solve(const ObjectiveOracle& f, const ExtendedBox& box,
                      double lambda, const IHTConfig& config, const Vector& x0,
                      const IHTHooks& hooks) {
  if (!(config.L_factor > 1.0) || !std::isfinite(config.L_factor)) {
    throw ParameterError("L_factor must be > 1");
  }
  const double L_f = f.lipschitz();
  const double L = config.L_factor * L_f;
  auto propose = [&](long, const Vector& x, const Evaluation& e, double) {
    Step st;
    st.x = threshold_from(x, e.gradient, box, lambda, L,
                          config.zero_tie_to_zero, hooks.invert_threshold);
    st.e = f.evaluate(st.x);
    st.F = l0_value(st.e.value, st.x, lambda);
    st.L = L;
    st.inner = 1;
    return st;
  };
  SolveReport rep = run_iht(f, box, lambda, x0, config.support_stable_window,
                            config.grad_tol, config.max_outer, 0.0, L - L_f,
                            hooks, propose);
  rep.L_final = L;
  rep.delta = lambda > 0.0 ? delta_lower_bound(box, lambda, L).delta : 0.0;
  return rep;
}

SolveReport iht_solve(const L0Problem& problem, const IHTConfig& config,
                      const Vector& x0, const IHTHooks& hooks) {
  return iht_solve(problem.objective, problem.box, problem.lambda, config, x0,
                   hooks);
}

SolveReport iht_variant_solve(const ObjectiveOracle& f, const ExtendedBox& box,
                              double lambda, const VariantConfig& config,
                              const Vector& x0, const IHTHooks& hooks) {
  if (!(config.L_min > 0.0) || !(config.L_min < config.L_max)) {
    throw ParameterError("variant: need 0 < L_min < L_max");
  }
  if (!(config.tau > 1.0)) throw ParameterError("variant: tau must be > 1");
  if (!(config.eta > 0.0)) throw ParameterError("variant: eta must be > 0");
  const double L_f = f.lipschitz();
  const double tau = config.tau;
  const double eta = config.eta;
  // Initial guesses above tau (L_f + eta) are never needed; capping them
  // keeps every accepted L below L_bar.
  const double L_cap = std::min(config.L_max, tau * (L_f + eta));
  const double L_bar = std::max(config.L_min, tau * (L_f + eta));
  const int cap = variant_inner_cap(L_f, eta, config.L_min, tau);

  Vector x_prev;
  Vector g_prev;
  auto propose = [&](long k, const Vector& x, const Evaluation& e, double F) {
    double L = k == 0 ? std::max(config.L_min, std::min(L_cap, L_f))
                      : bb_initial_L(x - x_prev, e.gradient - g_prev,
                                     config.L_min, L_cap);
    Step st;
    for (int inner = 1;; ++inner) {
      if (inner > cap) {
        throw InvariantViolation("variant: inner iterations exceeded the cap");
      }
      st.x = threshold_from(x, e.gradient, box, lambda, L,
                            config.zero_tie_to_zero, hooks.invert_threshold);
      st.e = f.evaluate(st.x);
      st.F = l0_value(st.e.value, st.x, lambda);
      const double d2 = (st.x - x).squaredNorm();
      const double slack =
          64.0 * std::numeric_limits<double>::epsilon() *
          std::max({1.0, std::abs(F), std::abs(st.F)});
      if (F - st.F >= 0.5 * eta * d2 - slack) {
        st.L = L;
        st.inner = inner;
        break;
      }
      L *= tau;
    }
    x_prev = x;
    g_prev = e.gradient;
    return st;
  };
  SolveReport rep = run_iht(f, box, lambda, x0, config.support_stable_window,
                            config.grad_tol, config.max_outer, L_f, eta, hooks,
                            propose);
  rep.inner_cap = cap;
  rep.delta = lambda > 0.0 ? delta_lower_bound(box, lambda, L_bar).delta : 0.0;
  return rep;
}

SolveReport iht_variant_solve(const L0Problem& problem,
                              const VariantConfig& config, const Vector& x0,
                              const IHTHooks& hooks) {
  return iht_variant_solve(problem.objective, problem.box, problem.lambda,
                           config, x0, hooks);
}

PerturbedReport solve_perturbed(const L0Problem& problem, double eps,
                                const IHTConfig& config, const Vector& x0) {
  if (!(eps > 0.0)) throw ParameterError("solve_perturbed: eps must be > 0");
  if (!problem.box.bounded()) {
    throw ParameterError("solve_perturbed: the box must be bounded");
  }
  if (problem.objective.strong_modulus() > 0.0) {
    throw ParameterError(
        "solve_perturbed: objective is strongly convex, use iht_solve");
  }
  const double D = problem.box.radius();
  if (!(D > 0.0)) throw ParameterError("solve_perturbed: box is a point");
  const double nu = eps / (D * D);
  const SmoothObjective fnu =
      SmoothObjective::perturbed(problem.objective, nu);

  IHTConfig cfg = config;
  // 2 |g|^2 / nu <= eps / 2 at the point after one more step
  cfg.grad_tol = std::min(config.grad_tol, 0.5 * std::sqrt(eps * nu));
  SolveReport rep = iht_solve(fnu, problem.box, problem.lambda, cfg, x0);

  if (rep.status == SolveStatus::Converged) {
    const RestrictedBox X(problem.box, rep.support_zero);
    const double L = cfg.L_factor * fnu.lipschitz();
    rep.x_star = pg_map(rep.x_star, fnu.gradient(rep.x_star), L, X).x_plus;
    rep.support_zero = zero_set(rep.x_star, 0.0);
  }
  rep.f_value = problem.objective.value(rep.x_star);
  rep.F_value = l0_value(rep.f_value, rep.x_star, problem.lambda);
  return {std::move(rep), nu, D};
}

}  // namespace l0iht
