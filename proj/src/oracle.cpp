#include "l0iht/oracle.hpp"

#include "l0iht/geometry.hpp"
#include "l0iht/iht_box.hpp"
#include "l0iht/pg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace l0iht {

namespace {

void check_size(Index n, int n_cap) {
  if (n_cap < 1 || n_cap > 30) throw ParameterError("n_cap must be in [1, 30]");
  if (n > n_cap) {
    throw ParameterError("enumeration refused: n = " + std::to_string(n) +
                         " exceeds n_cap = " + std::to_string(n_cap));
  }
}

std::vector<bool> mask_bits(std::uint32_t mask, Index n) {
  std::vector<bool> bits(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
  return bits;
}

IndexSet mask_set(std::uint32_t mask, Index n) {
  IndexSet s;
  for (Index i = 0; i < n; ++i) {
    if ((mask >> i) & 1u) s.push_back(i);
  }
  return s;
}

std::uint32_t zero_mask_of(const Vector& x) {
  std::uint32_t m = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) == 0.0) m |= (1u << i);
  }
  return m;
}

void snap(Vector& x, double zero_tol) {
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) <= zero_tol) x(i) = 0.0;
  }
}

struct InnerResult {
  Vector x;
  double gnorm;
  bool converged;
};

// Accelerated projected gradient with gradient-based adaptive restart.
InnerResult fista(const std::function<Evaluation(const Vector&)>& eval,
                  double L, const RestrictedBox& X, const Vector& x0,
                  double tol, long max_iters) {
  Vector x = X.project(x0);
  Vector y = x;
  double t = 1.0;
  double gn = kInf;
  for (long it = 0; it < max_iters; ++it) {
    const Evaluation ey = eval(y);
    Vector xn = X.project(y - ey.gradient / L);
    if ((y - xn).dot(xn - x) > 0.0) {
      t = 1.0;  // momentum points uphill
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = std::move(xn);
    t = tn;
    const Evaluation ex = eval(x);
    gn = pg_map(x, ex.gradient, L, X).g.norm();
    if (gn <= tol) return {x, gn, true};
  }
  return {x, gn, false};
}

void finalize(EnumerationResult& out, double lambda) {
  // A record is a local minimizer when its point also minimizes over the
  // restriction given by its own zero pattern.
  for (SupportRecord& r : out.records) {
    if (!r.feasible || !r.converged) continue;
    const std::uint32_t realized = zero_mask_of(r.x);
    r.consistent = realized == r.mask;
    if (r.consistent) {
      r.local_min = true;
    } else {
      const SupportRecord& twin = out.records[realized];
      r.local_min = twin.feasible && twin.converged &&
                    (twin.x - r.x).norm() <= 1e-6 * std::max(1.0, r.x.norm());
    }
  }
  for (const SupportRecord& r : out.records) {
    if (!r.consistent) continue;
    if (r.F < out.F_global) {
      out.F_global = r.F;
      out.x_global = r.x;
      out.global_mask = r.mask;
    }
  }
  // Without the l0 term only minimizers of the convex f remain local.
  for (SupportRecord& r : out.records) {
    if (!r.consistent) continue;
    if (lambda == 0.0 &&
        r.F > out.F_global + 1e-9 * std::max(1.0, std::abs(out.F_global))) {
      r.local_min = false;
      continue;
    }
    out.locals.push_back(r.mask);
  }
  for (SupportRecord& r : out.records) {
    if (r.local_min && !r.consistent) {
      r.local_min = out.records[zero_mask_of(r.x)].local_min;
    }
  }
}

}  // namespace

EnumerationResult enumerate_box(const L0Problem& problem, double tol,
                                int n_cap) {
  const Index n = problem.dim();
  check_size(n, n_cap);
  if (!(tol > 0.0)) throw ParameterError("enumerate_box: tol must be > 0");
  EnumerationResult out;
  out.zero_tol = 1e-10;
  const std::uint32_t count = 1u << n;
  out.records.resize(count);

  PGConfig cfg;
  cfg.L = problem.objective.lipschitz();
  cfg.stop_grad_tol = tol * 1e-2;
  cfg.max_iters = 2000000;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    SupportRecord& r = out.records[mask];
    r.mask = mask;
    r.I = mask_set(mask, n);
    const RestrictedBox X(problem.box, mask_bits(mask, n));
    const PGResult res =
        pg_solve(problem.objective, X, cfg, Vector::Zero(n));
    r.converged = res.status == SolveStatus::Converged;
    r.x = res.x;
    snap(r.x, out.zero_tol);
    r.f = problem.objective.value(r.x);
    r.F = l0_value(r.f, r.x, problem.lambda);
  }
  finalize(out, problem.lambda);
  return out;
}

EnumerationResult enumerate_cone(const ConeL0Problem& problem, double tol,
                                 int n_cap) {
  const Index n = problem.dim();
  check_size(n, n_cap);
  if (!(tol > 0.0)) throw ParameterError("enumerate_cone: tol must be > 0");
  EnumerationResult out;
  out.zero_tol = 1e-9;
  const std::uint32_t count = 1u << n;
  out.records.resize(count);

  const Matrix& A = problem.A;
  const Vector& b = problem.b;
  const ConeSpec& K = problem.cone;
  const double a2 = problem.opnorm_A * problem.opnorm_A;
  const double L_f = problem.objective.lipschitz();
  const double feas_target = tol * 1e-3;
  const double rho_cap = 1e6 * std::max(1.0, L_f) / a2;

  auto feas_eval = [&](const Vector& x) {
    const Vector v = A * x - b;
    const Vector r = v - K.project_dual(v);
    return Evaluation{0.5 * r.squaredNorm(), A.transpose() * r};
  };

  for (std::uint32_t mask = 0; mask < count; ++mask) {
    SupportRecord& r = out.records[mask];
    r.mask = mask;
    r.I = mask_set(mask, n);
    const RestrictedBox X(problem.box, mask_bits(mask, n));

    // Phase 1: least squared distance to feasibility over B_I.
    const InnerResult p1 =
        fista(feas_eval, a2, X, Vector::Zero(n), 1e-13, 200000);
    const double d1 = K.dist_dual(A * p1.x - b);
    r.feasible = d1 <= 1e-6;
    if (!r.feasible) {
      r.converged = p1.converged;
      r.x = p1.x;
      r.f = problem.objective.value(r.x);
      r.F = kInf;
      continue;
    }

    // Phase 2: augmented Lagrangian for the restricted cone program.
    Vector mu = Vector::Zero(A.rows());
    double rho = std::max(1.0, L_f) / a2;
    Vector x = p1.x;
    double d_prev = kInf;
    bool ok = false;
    for (int outer = 0; outer < 200 && !ok; ++outer) {
      const Vector shift = mu / rho;
      auto al_eval = [&](const Vector& z) {
        Evaluation e = problem.objective.evaluate(z);
        const Vector w = A * z - b + shift;
        const Vector q = w - K.project_dual(w);
        e.value += 0.5 * rho * q.squaredNorm();
        e.gradient += rho * (A.transpose() * q);
        return e;
      };
      const double L_in = L_f + rho * a2;
      // never ask for less than the roundoff floor of the gradient map
      const double in_tol =
          std::max(tol * 1e-2, 1e-13 * L_in * std::max(1.0, x.norm()));
      const InnerResult in = fista(al_eval, L_in, X, x, in_tol, 200000);
      x = in.x;
      const Vector w = A * x - b + shift;
      const Vector mu_new = rho * (w - K.project_dual(w));
      const double d = K.dist_dual(A * x - b);
      const double dmu = (mu_new - mu).norm();
      mu = mu_new;
      if (in.converged && d <= feas_target &&
          dmu <= tol * std::max(1.0, mu.norm())) {
        ok = true;
      } else if (d > 0.25 * d_prev && rho < rho_cap) {
        rho = std::min(10.0 * rho, rho_cap);
      }
      d_prev = d;
    }
    r.converged = ok;
    r.x = x;
    snap(r.x, out.zero_tol);
    r.mu = mu;
    r.mu_norm = mu.norm();
    r.f = problem.objective.value(r.x);
    r.F = l0_value(r.f, r.x, problem.lambda);
  }

  finalize(out, problem.lambda);
  for (const SupportRecord& r : out.records) {
    if (r.feasible && r.converged && r.mu_norm) {
      out.t_hat = std::max(out.t_hat.value_or(0.0), *r.mu_norm);
    }
  }
  return out;
}

OracleMatch nearest_local_min(const EnumerationResult& e, const Vector& x) {
  OracleMatch m;
  const std::uint32_t zx = zero_mask_of(x);
  for (std::uint32_t mask : e.locals) {
    const SupportRecord& r = e.records[mask];
    const double d = (r.x - x).norm();
    if (d < m.distance) {
      m.distance = d;
      m.mask = mask;
      m.support_equal = zero_mask_of(r.x) == zx;
    }
  }
  return m;
}

ComplexityConstants complexity_constants(const L0Problem& problem, double L,
                                         const Vector& x0,
                                         const EnumerationResult& e,
                                         std::optional<double> F_star) {
  const double L_f = problem.objective.lipschitz();
  if (!(L > L_f)) throw ParameterError("complexity: need L > L_f");
  if (!(problem.lambda > 0.0)) {
    throw ParameterError("complexity: lambda must be > 0");
  }
  ComplexityConstants c;
  const double thr = 2.0 * problem.lambda / L;
  c.alpha = kInf;
  c.beta = 0.0;
  for (const SupportRecord& r : e.records) {
    const Vector s = r.x - problem.objective.gradient(r.x) / L;
    const Vector p = project_box(s, problem.box);
    for (Index i = 0; i < s.size(); ++i) {
      const double gap = s(i) * s(i) - (p(i) - s(i)) * (p(i) - s(i)) - thr;
      c.alpha = std::min(c.alpha, std::abs(gap));
      c.beta = std::max(c.beta, std::abs(s(i)) + std::abs(p(i) - s(i)));
    }
  }
  c.delta = delta_lower_bound(problem.box, problem.lambda, L).delta;
  c.F0 = problem.value(x0);
  const double F_low = e.F_global;
  c.F_star = F_star.value_or(F_low);
  const double spread = c.F0 - c.F_star;
  c.J_budget = static_cast<long>(
      std::floor(std::max(0.0, 2.0 * spread / ((L - L_f) * c.delta * c.delta))));

  const double sigma = problem.objective.strong_modulus();
  if (!(sigma > 0.0)) {
    c.notes.push_back("sigma = 0: gamma, c, d, omega and theta omitted");
    return c;
  }
  c.gamma = sigma * std::pow(std::sqrt(2.0 * c.alpha + c.beta * c.beta) - c.beta,
                             2) / 32.0;
  const double spread_low = c.F0 - F_low;
  if (!(spread_low > 0.0) || !(*c.gamma > 0.0)) {
    c.notes.push_back(
        "F(x0) equals the global value or gamma = 0: c, d, omega and theta "
        "omitted");
    return c;
  }
  c.c = (L - L_f) * c.delta * c.delta / (2.0 * spread_low);
  c.d = 2.0 * std::log2(spread_low) + 4.0 - 2.0 * std::log2(*c.gamma) + *c.c;
  double omega = -kInf;
  for (long t = 0; t <= c.J_budget; ++t) {
    const double td = static_cast<double>(t);
    omega = std::max(omega, (*c.d - 2.0 * *c.c) * td - *c.c * td * td);
  }
  c.omega = omega;
  c.theta = spread * std::pow(2.0, (omega + 3.0) / 2.0);
  return c;
}

double fd_gradient_check(const ObjectiveOracle& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw ParameterError("fd_gradient_check: h must be > 0");
  const Vector g = f.gradient(x);
  double worst = 0.0;
  Vector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = f.value(xp);
    xp(i) = x(i) - h;
    const double fm = f.value(xp);
    xp(i) = x(i);
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g(i)) / std::max(1.0, std::abs(g(i))));
  }
  return worst;
}

}  // namespace l0iht
