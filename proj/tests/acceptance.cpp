// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include "l0iht/geometry.hpp"
#include "l0iht/iht_box.hpp"
#include "l0iht/iht_cone.hpp"
#include "l0iht/instance_gen.hpp"
#include "l0iht/oracle.hpp"
#include "l0iht/pg_solver.hpp"
#include "l0iht/rng.hpp"
#include "l0iht/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace l0iht;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void run(const char* id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& ex) {
    o.pass = false;
    o.detail = std::string("exception: ") + ex.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s %s %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector random_in_box(Pcg32& rng, const ExtendedBox& box, double scale) {
  Vector x(box.dim());
  for (Index i = 0; i < x.size(); ++i) x(i) = scale * (2.0 * rng.uniform() - 1.0);
  return project_box(x, box);
}

// 50 least-squares instances with n in [10, 50].
std::vector<L0Problem> descent_instances() {
  std::vector<L0Problem> out;
  const double radii[] = {2.0, 5.0, kInf};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    InstanceSpec s;
    s.n = 10 + static_cast<Index>((seed * 7) % 41);
    s.m = seed % 2 == 0 ? s.n / 2 + 2 : 2 * s.n;
    s.k = std::max<Index>(1, s.n / 5);
    s.noise_sigma = 0.05;
    s.box_radius = radii[seed % 3];
    s.seed = 1000 + seed;
    s.lambda = seed % 2 == 0 ? 0.01 : 0.05;
    out.push_back(gen_least_squares(s).problem);
  }
  return out;
}

// Small instances for the enumeration oracle, m >= n.
std::vector<L0Problem> small_instances(std::uint64_t base, int count) {
  std::vector<L0Problem> out;
  for (int j = 0; j < count; ++j) {
    InstanceSpec s;
    s.n = 4 + j % 7;
    s.m = s.n + 2 + j % 5;
    s.k = std::max<Index>(1, s.n / 3);
    s.noise_sigma = 0.05;
    s.box_radius = j % 4 == 3 ? kInf : 2.0;
    s.seed = base + static_cast<std::uint64_t>(j);
    s.lambda = j % 2 == 0 ? 0.02 : 0.08;
    out.push_back(gen_least_squares(s).problem);
  }
  return out;
}

Outcome descent_and_floor(bool floor_check) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<L0Problem> probs = descent_instances();
  long steps = 0;
  long bad = 0;
  double worst = kInf;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const L0Problem& p = probs[j];
    Pcg32 rng(j);
    const Vector x0 = random_in_box(rng, p.box, 1.5);
    IHTConfig cfg;
    const double L_f = p.objective.lipschitz();
    const double delta = delta_lower_bound(p.box, p.lambda, cfg.L_factor * L_f).delta;
    IHTHooks hooks;
    hooks.observer = [&](const StepEvent& ev) {
      ++steps;
      if (floor_check) {
        for (Index i = 0; i < ev.x_next.size(); ++i) {
          if (ev.x_next(i) == 0.0) continue;
          const double slack = std::abs(ev.x_next(i)) - (delta - 1e-10);
          worst = std::min(worst, slack);
          if (slack < 0.0) ++bad;
        }
      } else {
        const double dx2 = (ev.x_next - ev.x_prev).squaredNorm();
        const double slack = (ev.F_prev - ev.F_next) - (0.5 * (ev.L - L_f) * dx2 - 1e-10);
        worst = std::min(worst, slack);
        if (slack < 0.0) ++bad;
      }
    };
    iht_solve(p, cfg, x0, hooks);
  }
  const double secs = elapsed_since(t0);
  std::ostringstream os;
  os << probs.size() << " instances, " << steps << " steps, " << bad
     << " violations, min slack " << worst << ", solve time " << secs << " s";
  return {bad == 0 && steps > 0 && (floor_check || secs < 10.0), os.str()};
}

Outcome support_budget() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<L0Problem> probs = small_instances(2000, 40);
  long bad = 0;
  long max_changes = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const L0Problem& p = probs[j];
    const EnumerationResult e = enumerate_box(p);
    const Vector x0 = Vector::Zero(p.dim());
    const double F0 = p.value(x0);
    const double L_f = p.objective.lipschitz();

    const IHTConfig cfg;
    const double L = cfg.L_factor * L_f;
    const double d = delta_lower_bound(p.box, p.lambda, L).delta;
    const long budget =
        static_cast<long>(std::floor(2.0 * (F0 - e.F_global) / ((L - L_f) * d * d)));
    const SolveReport r = iht_solve(p, cfg, x0);
    if (r.support_changes > budget) ++bad;
    max_changes = std::max(max_changes, r.support_changes);

    const VariantConfig vc;
    const SolveReport v = iht_variant_solve(p, vc, x0);
    const long vbudget = static_cast<long>(
        std::floor(2.0 * (F0 - e.F_global) / (vc.eta * v.delta * v.delta)));
    if (v.support_changes > vbudget) ++bad;
  }
  const double secs = elapsed_since(t0);
  std::ostringstream os;
  os << probs.size() << " instances x 2 solvers, " << bad << " over budget, max changes "
     << max_changes << ", total " << secs << " s";
  return {bad == 0 && secs < 60.0, os.str()};
}

Outcome local_min_match() {
  const std::vector<L0Problem> probs = small_instances(3000, 30);
  long bad = 0;
  double worst = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const L0Problem& p = probs[j];
    const EnumerationResult e = enumerate_box(p);
    Pcg32 rng(j);
    const Vector x0 = random_in_box(rng, p.box, 1.0);
    const SolveReport reps[] = {iht_solve(p, IHTConfig{}, x0),
                                iht_variant_solve(p, VariantConfig{}, x0)};
    for (const SolveReport& r : reps) {
      const OracleMatch m = nearest_local_min(e, r.x_star);
      worst = std::max(worst, m.distance);
      if (!(m.distance <= 1e-6 && m.support_equal)) ++bad;
    }
  }
  std::ostringstream os;
  os << probs.size() << " instances x 2 solvers, " << bad << " unmatched, max distance "
     << worst;
  return {bad == 0, os.str()};
}

Outcome pg_rate() {
  long runs = 0;
  long bad = 0;
  long worst_margin = -1;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Pcg32 rng(4000 + seed);
    const Index n = 10 + static_cast<Index>(seed % 4) * 5;
    Matrix M(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index c = 0; c < n; ++c) M(i, c) = rng.normal();
    }
    const double shift = seed % 2 == 0 ? 0.05 : 0.5;
    Matrix Q = M.transpose() * M / static_cast<double>(n);
    Q = 0.5 * (Q + Q.transpose()) + shift * Matrix::Identity(n, n);

    // Minimizer chosen first: interior entries have zero gradient, entries
    // on a bound have a gradient pushing outward.
    Vector xs(n);
    Vector g = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
      const double r = rng.uniform();
      if (r < 0.25) {
        xs(i) = 1.0;
        g(i) = -(0.1 + rng.uniform());
      } else if (r < 0.5) {
        xs(i) = -1.0;
        g(i) = 0.1 + rng.uniform();
      } else {
        xs(i) = 1.6 * rng.uniform() - 0.8;
      }
    }
    const Vector c = g - Q * xs;
    const SmoothObjective phi = SmoothObjective::quadratic(Q, c);
    const double phi_star = 0.5 * xs.dot(Q * xs) + c.dot(xs);
    const RestrictedBox X(ExtendedBox::symmetric(n, 1.0));
    const Vector x0 = Vector::Zero(n);
    const double gap0 = phi.value(x0) - phi_star;
    const double L = phi.lipschitz();
    const double sigma = phi.strong_modulus();

    for (double eps : {1e-2, 1e-4, 1e-6}) {
      ++runs;
      const long budget =
          gap0 <= eps ? 1
                      : 2 * static_cast<long>(std::ceil(L / sigma)) *
                                static_cast<long>(std::ceil(std::log2(gap0 / eps))) +
                            1;
      PGConfig cfg;
      cfg.L = L;
      cfg.stop_grad_tol = 0.0;
      cfg.max_iters = 10 * budget + 10;
      cfg.strong_modulus_hint = sigma;
      cfg.target_gap = eps;
      cfg.optimal_value = phi_star;
      const PGResult r = pg_solve(phi, X, cfg, x0);
      long first = -1;
      for (const PGTraceRow& row : r.trace) {
        if (row.value - phi_star <= eps) {
          first = row.iter;
          break;
        }
      }
      if (first < 0 && r.value - phi_star <= eps) first = r.iters;
      if (first < 0 || first > budget) {
        ++bad;
      } else {
        worst_margin = worst_margin < 0 ? budget - first
                                        : std::min(worst_margin, budget - first);
      }
    }
  }
  std::ostringstream os;
  os << runs << " runs, " << bad << " missed the budget, min spare iterations "
     << worst_margin;
  return {bad == 0, os.str()};
}

Outcome inner_cap() {
  long rows = 0;
  long bad = 0;
  int max_seen = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (Index n : {20, 50}) {
      for (double lambda : {0.01, 0.1}) {
        for (double L_min : {1e-3, 1e-1}) {
          for (double tau : {2.0, 4.0}) {
            InstanceSpec s;
            s.n = n;
            s.m = seed % 2 == 0 ? n / 2 : 2 * n;
            s.k = 4;
            s.noise_sigma = 0.05;
            s.box_radius = 2.0;
            s.seed = seed;
            s.lambda = lambda;
            const L0Problem p = gen_least_squares(s).problem;
            SolverSettings st;
            st.variant.L_min = L_min;
            st.variant.tau = tau;
            const RunOutcome o = run_solver(p, SolverKind::IhtVariant, st);
            const double L_f = p.objective.lipschitz();
            const int cap = static_cast<int>(std::ceil(
                                (std::log(L_f + st.variant.eta) - std::log(L_min)) /
                                std::log(tau))) +
                            2;
            ++rows;
            max_seen = std::max(max_seen, o.report.max_inner_per_outer);
            if (o.report.max_inner_per_outer > cap || o.report.inner_cap != cap) ++bad;
          }
        }
      }
    }
  }
  std::ostringstream os;
  os << rows << " bench rows, " << bad << " over cap, max inner per outer " << max_seen;
  return {bad == 0, os.str()};
}

struct ConeCase {
  ConeL0Problem problem;
  EnumerationResult enumeration;
  double t;
};

std::vector<ConeCase>& cone_cases() {
  static std::vector<ConeCase> cases = [] {
    std::vector<ConeCase> out;
    const ConeFamily fams[] = {ConeFamily::Nonneg, ConeFamily::Equality, ConeFamily::Soc};
    for (int j = 0; j < 20; ++j) {
      InstanceSpec s;
      s.n = 8;
      s.m = 16;
      s.k = 3;
      s.noise_sigma = 0.05;
      s.box_radius = 2.0;
      s.cone_kind = fams[j % 3];
      s.seed = 5000 + static_cast<std::uint64_t>(j);
      s.lambda = 0.02;
      ConeL0Problem p = gen_cone(s).problem;
      EnumerationResult e = enumerate_cone(p);
      const double t = std::max(2.0 * e.t_hat.value_or(0.0), 1e-3);
      out.push_back({std::move(p), std::move(e), t});
    }
    return out;
  }();
  return cases;
}

Outcome cone_certificates() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 1e-2;
  long bad = 0;
  double feas = 0.0;
  double comp = 0.0;
  double stat = 0.0;
  for (const ConeCase& c : cone_cases()) {
    const Vector x0 = start_point(c.problem, SolverKind::PenaltyFixed, StartPoint::Auto);
    const PenaltyResult r = penalty_solve_fixed(c.problem, eps, c.t, PenaltyConfig{}, x0);
    const Certificate& cert = r.certificate;
    feas = std::max(feas, cert.feas_residual);
    comp = std::max(comp, cert.complementarity);
    stat = std::max(stat, cert.stationarity_residual);
    if (!(cert.feas_residual <= eps && cert.complementarity <= 1e-8 &&
          cert.stationarity_residual <= eps)) {
      ++bad;
    }
  }
  const double secs = elapsed_since(t0);
  std::ostringstream os;
  os << cone_cases().size() << " instances, " << bad << " failed, max feas " << feas
     << ", max comp " << comp << ", max stationarity " << stat << ", total " << secs
     << " s";
  return {bad == 0 && secs < 120.0, os.str()};
}

Outcome dynamic_decay() {
  long rounds = 0;
  long bad_rounds = 0;
  long unmatched = 0;
  double worst = 0.0;
  for (const ConeCase& c : cone_cases()) {
    DynamicSchedule sched;
    sched.t = c.t;
    sched.eps_final = 1e-5;
    const Vector x0 = start_point(c.problem, SolverKind::PenaltyDynamic, StartPoint::Auto);
    const DynamicResult r = penalty_solve_dynamic(c.problem, sched, PenaltyConfig{}, x0);
    for (const DynamicRound& d : r.rounds) {
      ++rounds;
      const double rho_k = sched.rho0 * std::pow(sched.tau, d.k);
      const bool rho_ok = std::abs(d.rho - rho_k) <= 1e-12 * rho_k;
      if (!rho_ok || d.feas_residual > d.t / d.rho + 1e-9) ++bad_rounds;
    }
    const OracleMatch m = nearest_local_min(c.enumeration, r.report.x_star);
    worst = std::max(worst, m.distance);
    if (!(m.distance <= 1e-3 && m.support_equal)) ++unmatched;
  }
  std::ostringstream os;
  os << cone_cases().size() << " instances, " << rounds << " rounds, " << bad_rounds
     << " rounds over t/rho_k, " << unmatched << " limits unmatched, max distance "
     << worst;
  return {bad_rounds == 0 && unmatched == 0, os.str()};
}

Outcome gradient_hygiene() {
  double fd_worst = 0.0;
  double descent_worst = -kInf;
  long bad = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    const ConeCase& c = cone_cases()[j];
    const ConeL0Problem& p = c.problem;
    const double nu = 0.05;
    const SmoothObjective f_nu = SmoothObjective::perturbed(p.objective, nu);
    const PenaltyObjective phi = make_penalty(p, 50.0);
    const PenaltyObjective phi_nu = make_penalty(p, 50.0, nu);
    const ObjectiveOracle* oracles[] = {&p.objective, &f_nu, &phi, &phi_nu};
    Pcg32 rng(6000 + j);
    for (const ObjectiveOracle* o : oracles) {
      for (int k = 0; k < 20; ++k) {
        Vector x(p.dim());
        for (Index i = 0; i < x.size(); ++i) x(i) = 3.0 * (2.0 * rng.uniform() - 1.0);
        const double err = fd_gradient_check(*o, x, 1e-6);
        fd_worst = std::max(fd_worst, err);
        if (!(err <= 1e-5)) ++bad;
      }
    }
    for (const PenaltyObjective* o : {&phi, &phi_nu}) {
      for (int k = 0; k < 200; ++k) {
        Vector x(p.dim());
        Vector y(p.dim());
        for (Index i = 0; i < x.size(); ++i) {
          x(i) = 3.0 * (2.0 * rng.uniform() - 1.0);
          y(i) = x(i) + std::pow(10.0, -3.0 * rng.uniform()) * (2.0 * rng.uniform() - 1.0);
        }
        const Evaluation ex = o->evaluate(x);
        const double upper =
            ex.value + ex.gradient.dot(y - x) + 0.5 * o->lipschitz() * (y - x).squaredNorm();
        const double excess = o->value(y) - upper;
        descent_worst = std::max(descent_worst, excess);
        if (excess > 1e-8) ++bad;
      }
    }
  }
  std::ostringstream os;
  os << "4 oracles x 20 points x 3 instances, max fd error " << fd_worst
     << ", max descent excess " << descent_worst << ", " << bad << " violations";
  return {bad == 0, os.str()};
}

// Candidate comparison: keep the clamped step value or zero, whichever has
// the smaller model cost L/2 (t - s)^2 + lambda [t != 0].
double threshold_oracle(double s, double l, double u, double lambda, double L,
                        bool zero_tie) {
  const double p = std::min(std::max(s, l), u);
  if (p == 0.0) return 0.0;
  const double keep = 0.5 * L * (p - s) * (p - s) + lambda;
  const double zero = 0.5 * L * s * s;
  if (keep < zero) return p;
  if (keep > zero) return 0.0;
  return zero_tie ? 0.0 : p;
}

Outcome threshold_exactness() {
  Pcg32 rng(7000);
  const double Ls[] = {0.5, 1.0, 2.0, 4.0};
  long mismatches = 0;
  long ties = 0;
  const long cases = 100000;
  for (long c = 0; c < cases; ++c) {
    // Dyadic data keeps every quantity exact in double precision.
    const double s = (static_cast<double>(rng.index(129)) - 64.0) / 16.0;
    const double l = -static_cast<double>(rng.index(17)) / 8.0;
    const double u = static_cast<double>(rng.index(17)) / 8.0;
    const double L = Ls[rng.index(4)];
    const bool zero_tie = rng.index(2) == 0;
    const double p = std::min(std::max(s, l), u);
    double lambda = static_cast<double>(rng.index(129)) / 64.0;
    const double tie_lambda = 0.5 * L * (s * s - (p - s) * (p - s));
    if (rng.index(3) == 0 && tie_lambda >= 0.0) lambda = tie_lambda;
    if (p != 0.0 && lambda == tie_lambda) ++ties;

    const double x = static_cast<double>(rng.index(65)) / 32.0 - 1.0;
    // f(y) = 1/2 (y - a)^2 with a chosen so that x - f'(x) / L = s.
    const double a = x - L * (x - s);
    const SmoothObjective f = SmoothObjective::least_squares(
        Matrix::Identity(1, 1), Vector::Constant(1, a), Constants{1.0, 1.0});
    const ExtendedBox box(Vector::Constant(1, l), Vector::Constant(1, u));
    const double want = threshold_oracle(s, l, u, lambda, L, zero_tie);
    const double got =
        hard_threshold_step(f, Vector::Constant(1, x), box, lambda, L, zero_tie)(0);
    const double got_coord = threshold_coordinate(s, l, u, lambda, L, zero_tie);
    if (got != want || got_coord != want) ++mismatches;
  }
  std::ostringstream os;
  os << cases << " cases (" << ties << " exact ties), " << mismatches << " mismatches";
  return {mismatches == 0 && ties > 0, os.str()};
}

}  // namespace

int main() {
  run("A1", "descent law", [] { return descent_and_floor(false); });
  run("A2", "magnitude floor", [] { return descent_and_floor(true); });
  run("A3", "support-change budget", support_budget);
  run("A4", "local-minimizer match", local_min_match);
  run("A5", "projected gradient linear rate", pg_rate);
  run("A6", "variant inner-iteration cap", inner_cap);
  run("A7", "cone certificates", cone_certificates);
  run("A8", "dynamic penalty feasibility decay", dynamic_decay);
  run("A9", "gradient and Lipschitz hygiene", gradient_hygiene);
  run("A10", "thresholding exactness", threshold_exactness);
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
