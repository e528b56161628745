#include "l0iht/iht_box.hpp"
#include "l0iht/oracle.hpp"
#include "l0iht/pg_solver.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace l0iht;
using l0iht::testing::expect_vec_near;
using l0iht::testing::random_matrix;
using l0iht::testing::random_vector;
using l0iht::testing::vec;

namespace {

SmoothObjective half_sq_dist(const Vector& c) {
  return SmoothObjective::least_squares(Matrix::Identity(c.size(), c.size()), c);
}

// Per-coordinate subproblem value L/2 (t - s)^2 + lambda [t != 0].
double q(double t, double s, double lambda, double L) {
  return 0.5 * L * (t - s) * (t - s) + (t != 0.0 ? lambda : 0.0);
}

}  // namespace

TEST(HardThreshold, ScalarExamples) {
  const auto f = half_sq_dist(vec({1}));
  const ExtendedBox box = ExtendedBox::symmetric(1, 2.0);
  EXPECT_EQ(hard_threshold_step(f, vec({0}), box, 0.1, 2.0), vec({0.5}));
  EXPECT_EQ(hard_threshold_step(f, vec({0}), box, 0.3, 2.0), vec({0}));
  // Candidate comparison: keeping 0.5 costs lambda, zeroing costs L/2 s^2.
  EXPECT_LT(q(0.5, 0.5, 0.1, 2.0), q(0.0, 0.5, 0.1, 2.0));
  EXPECT_GT(q(0.5, 0.5, 0.3, 2.0), q(0.0, 0.5, 0.3, 2.0));

  const auto g = half_sq_dist(vec({0}));
  EXPECT_EQ(hard_threshold_step(g, vec({0}), box, 0.5, 2.0), vec({0}));
}

TEST(HardThreshold, ZeroLambdaIsProjectedGradient) {
  Pcg32 rng(3);
  const auto f = SmoothObjective::least_squares(random_matrix(rng, 6, 4), random_vector(rng, 6));
  const ExtendedBox box(vec({-0.3, 0, -kInf, -1}), vec({0.3, kInf, 0, 1}));
  for (int k = 0; k < 50; ++k) {
    const Vector x = project_box(random_vector(rng, 4), box);
    const double L = 1.5 * f.lipschitz();
    const Vector expect = project_box(x - f.gradient(x) / L, box);
    EXPECT_EQ(hard_threshold_step(f, x, box, 0.0, L), expect);
  }
}

TEST(HardThreshold, TieRule) {
  // s = 1, L = 2, lambda = 1: s^2 = 2 lambda / L exactly.
  EXPECT_EQ(threshold_coordinate(1.0, -5, 5, 1.0, 2.0, true), 0.0);
  EXPECT_EQ(threshold_coordinate(1.0, -5, 5, 1.0, 2.0, false), 1.0);
  // Clipped tie: s = 2, p = 1, s^2 - (p - s)^2 = 3 = 2 * 1.5 / 1.
  EXPECT_EQ(threshold_coordinate(2.0, -1, 1, 1.5, 1.0, true), 0.0);
  EXPECT_EQ(threshold_coordinate(2.0, -1, 1, 1.5, 1.0, false), 1.0);
  // Pinned coordinate.
  EXPECT_EQ(threshold_coordinate(3.0, 0, 0, 0.0, 1.0, false), 0.0);
}

TEST(DeltaLowerBound, Examples) {
  const DeltaBound a = delta_lower_bound(ExtendedBox(vec({-1, 0}), vec({1, 1})), 0.3, 2.0);
  EXPECT_NEAR(a.delta, 0.5477225575051661, 1e-15);
  EXPECT_DOUBLE_EQ(a.per_coord(0), std::sqrt(0.3));
  EXPECT_DOUBLE_EQ(a.per_coord(1), std::sqrt(0.3));

  const DeltaBound b = delta_lower_bound(ExtendedBox(vec({0}), vec({0.1})), 10, 1);
  EXPECT_EQ(b.delta, 0.1);

  const DeltaBound c = delta_lower_bound(ExtendedBox::unbounded(1), 0.5, 1);
  EXPECT_EQ(c.delta, 1.0);

  const DeltaBound d = delta_lower_bound(ExtendedBox(vec({0, -2}), vec({0, 0})), 8, 1);
  EXPECT_EQ(d.per_coord(0), kInf);
  EXPECT_EQ(d.delta, 2.0);
  EXPECT_EQ(delta_lower_bound(ExtendedBox(vec({0}), vec({0})), 1, 1).delta, kInf);

  EXPECT_THROW(delta_lower_bound(ExtendedBox::unbounded(1), 0.0, 1), ParameterError);
  EXPECT_THROW(delta_lower_bound(ExtendedBox::unbounded(1), 1, 0.0), ParameterError);
}

TEST(BbInitialL, Examples) {
  EXPECT_EQ(bb_initial_L(vec({1, 0}), vec({2, 0}), 0.5, 100), 2.0);
  EXPECT_EQ(bb_initial_L(vec({1, 0}), vec({0.1, 0}), 0.5, 100), 0.5);
  EXPECT_EQ(bb_initial_L(vec({1, 0}), vec({1000, 0}), 0.5, 100), 100.0);
  EXPECT_EQ(bb_initial_L(vec({0, 0}), vec({1, 0}), 0.5, 100), 0.5);
}

TEST(VariantInnerCap, Example) {
  EXPECT_EQ(variant_inner_cap(10, 1, 1, 2), 6);
}

TEST(IhtSolve, SparseQuadraticExample) {
  const L0Problem p(half_sq_dist(vec({3, 0.01})), ExtendedBox::symmetric(2, 5.0), 0.5);
  const SolveReport r = iht_solve(p, IHTConfig{}, vec({0, 0}));
  EXPECT_EQ(r.status, SolveStatus::Converged);
  expect_vec_near(r.x_star, vec({3, 0}), 1e-8);
  EXPECT_EQ(r.support_zero, IndexSet{1});

  // Enumeration cross-check.
  const EnumerationResult e = enumerate_box(p);
  EXPECT_EQ(e.global_mask, 0b10u);
  EXPECT_NEAR(e.F_global, 0.5 * 0.01 * 0.01 + 0.5, 1e-12);
  EXPECT_NEAR(r.F_value, e.F_global, 1e-12);

  const SolveReport v = iht_variant_solve(p, VariantConfig{}, vec({0, 0}));
  EXPECT_EQ(v.support_zero, IndexSet{1});
}

TEST(IhtSolve, HugeLambdaGivesZero) {
  const L0Problem p(half_sq_dist(vec({3, 0.01})), ExtendedBox::symmetric(2, 5.0), 100);
  const SolveReport r = iht_solve(p, IHTConfig{}, vec({3, 0.01}));
  EXPECT_EQ(r.x_star, Vector::Zero(2));
  EXPECT_DOUBLE_EQ(r.F_value, p.objective.value(Vector::Zero(2)));
  EXPECT_EQ(enumerate_box(p).global_mask, 0b11u);
}

TEST(IhtSolve, FixedPointStart) {
  const L0Problem p(half_sq_dist(vec({3, 0.01})), ExtendedBox::symmetric(2, 5.0), 0.5);
  const SolveReport r = iht_solve(p, IHTConfig{}, vec({3, 0}));
  EXPECT_EQ(r.support_changes, 0);
  EXPECT_EQ(r.x_star, vec({3, 0}));
}

TEST(IhtSolve, CapReportsBestIterate) {
  Pcg32 rng(8);
  const L0Problem p(SmoothObjective::least_squares(random_matrix(rng, 8, 5), random_vector(rng, 8)),
                    ExtendedBox::symmetric(5, 2.0), 0.01);
  IHTConfig c;
  c.max_outer = 1;
  const SolveReport r = iht_solve(p, c, Vector::Zero(5));
  EXPECT_EQ(r.status, SolveStatus::IterationCapped);
  EXPECT_LE(r.F_value, r.F_initial);
}

TEST(IhtSolve, RejectsBadConfig) {
  const L0Problem p(half_sq_dist(vec({1})), ExtendedBox::symmetric(1, 2.0), 0.1);
  IHTConfig c;
  c.L_factor = 1.0;
  EXPECT_THROW(iht_solve(p, c, vec({0})), ParameterError);
  EXPECT_THROW(iht_solve(p, IHTConfig{}, vec({3})), ParameterError);
  VariantConfig v;
  v.tau = 1.0;
  EXPECT_THROW(iht_variant_solve(p, v, vec({0})), ParameterError);
  v = VariantConfig{};
  v.L_min = 2e8;
  EXPECT_THROW(iht_variant_solve(p, v, vec({0})), ParameterError);
}

TEST(IhtVariant, InnerCountOneWhenInitialLIsLarge) {
  const L0Problem p(half_sq_dist(vec({3, 0.01})), ExtendedBox::symmetric(2, 5.0), 0.5);
  VariantConfig c;
  c.L_min = 10.0;  // above L_f + eta
  const SolveReport r = iht_variant_solve(p, c, vec({0, 0}));
  for (const auto& row : r.trace) {
    if (row.iter > 0) EXPECT_EQ(row.inner, 1);
  }
  EXPECT_EQ(r.max_inner_per_outer, 1);
}

TEST(SolvePerturbed, NuFromRadius) {
  const L0Problem p(SmoothObjective::quadratic(Matrix::Zero(2, 2), vec({1, -1})),
                    ExtendedBox::symmetric(2, 1.0), 0.1);
  const PerturbedReport r = solve_perturbed(p, 0.2, IHTConfig{}, vec({0, 0}));
  EXPECT_DOUBLE_EQ(r.radius, std::sqrt(2.0));
  EXPECT_NEAR(r.nu, 0.1, 1e-15);
  EXPECT_EQ(r.report.status, SolveStatus::Converged);
}

TEST(SolvePerturbed, Rejections) {
  const L0Problem strong(half_sq_dist(vec({1, 1})), ExtendedBox::symmetric(2, 1.0), 0.1);
  EXPECT_THROW(solve_perturbed(strong, 0.1, IHTConfig{}, vec({0, 0})), ParameterError);
  const L0Problem open(SmoothObjective::quadratic(Matrix::Zero(1, 1), vec({1})),
                       ExtendedBox::unbounded(1), 0.1);
  EXPECT_THROW(solve_perturbed(open, 0.1, IHTConfig{}, vec({0})), ParameterError);
}

TEST(SolvePerturbed, LinearObjectiveWithinEpsOfRestrictedMin) {
  Pcg32 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector c = random_vector(rng, 3);
    const ExtendedBox box(vec({-1, -0.5, 0}), vec({1, 2, 1.5}));
    const L0Problem p(SmoothObjective::quadratic(Matrix::Zero(3, 3), c), box, 0.2);
    const double eps = 1e-3;
    const PerturbedReport r = solve_perturbed(p, eps, IHTConfig{}, Vector::Zero(3));
    ASSERT_EQ(r.report.status, SolveStatus::Converged);
    // Over B_I of its own support, x_eps is eps-optimal for the linear f.
    const Vector lo = box.lower(), hi = box.upper();
    double fmin = 0.0;
    for (Index i = 0; i < 3; ++i) {
      if (r.report.x_star(i) == 0.0) continue;
      fmin += std::min(c(i) * lo(i), c(i) * hi(i));
    }
    EXPECT_LE(r.report.f_value, fmin + eps);
  }
}

// --- properties ---

namespace {

struct Case {
  L0Problem problem;
  Vector x0;
};

Case random_case(std::uint64_t seed, Index n) {
  Pcg32 rng(seed);
  const Index m = n + 3;
  const Matrix A = random_matrix(rng, m, n, 1.0 / std::sqrt(static_cast<double>(m)));
  Vector x_true = Vector::Zero(n);
  for (Index i = 0; i < n; i += 2) x_true(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const Vector b = A * x_true + random_vector(rng, m, 0.1);
  Vector lo(n), hi(n);
  for (Index i = 0; i < n; ++i) {
    const double r = rng.uniform();
    lo(i) = r < 0.2 ? 0.0 : -1.5;
    hi(i) = r > 0.8 ? 0.0 : 1.5;
    if (i == 1) lo(i) = hi(i) = 0.0;
  }
  const ExtendedBox box(lo, hi);
  const double lambda = 0.005 + 0.05 * rng.uniform();
  return {L0Problem(SmoothObjective::least_squares(A, b), box, lambda),
          project_box(random_vector(rng, n), box)};
}

struct Observed {
  std::vector<Vector> xs;
  std::vector<double> Fs;
  std::vector<double> Ls;
};

IHTHooks recorder(Observed& o) {
  IHTHooks h;
  h.observer = [&o](const StepEvent& ev) {
    if (o.xs.empty()) {
      o.xs.push_back(ev.x_prev);
      o.Fs.push_back(ev.F_prev);
    }
    o.xs.push_back(ev.x_next);
    o.Fs.push_back(ev.F_next);
    o.Ls.push_back(ev.L);
  };
  return h;
}

bool same_support(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if ((a(i) == 0.0) != (b(i) == 0.0)) return false;
  }
  return true;
}

}  // namespace

TEST(IhtProperties, DescentFloorJumpBudget) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Case c = random_case(seed, 7);
    const L0Problem& p = c.problem;
    const double Lf = p.objective.lipschitz();
    const EnumerationResult e = enumerate_box(p);
    for (int variant = 0; variant < 2; ++variant) {
      Observed o;
      SolveReport r;
      double gap_coeff, delta;
      if (variant == 0) {
        IHTConfig cfg;
        r = iht_solve(p, cfg, c.x0, recorder(o));
        gap_coeff = cfg.L_factor * Lf - Lf;
        delta = delta_lower_bound(p.box, p.lambda, cfg.L_factor * Lf).delta;
      } else {
        VariantConfig cfg;
        r = iht_variant_solve(p, cfg, c.x0, recorder(o));
        gap_coeff = cfg.eta;
        delta = r.delta;
        EXPECT_LE(r.max_inner_per_outer, r.inner_cap);
        EXPECT_EQ(r.inner_cap, variant_inner_cap(Lf, cfg.eta, cfg.L_min, cfg.tau));
      }
      ASSERT_EQ(r.status, SolveStatus::Converged) << "seed " << seed;
      EXPECT_EQ(r.delta, delta);
      long changes = 0;
      for (std::size_t k = 0; k + 1 < o.xs.size(); ++k) {
        const double dx = (o.xs[k + 1] - o.xs[k]).norm();
        EXPECT_LE(o.Fs[k + 1], o.Fs[k] + 1e-10);
        EXPECT_GE(o.Fs[k] - o.Fs[k + 1], 0.5 * gap_coeff * dx * dx - 1e-10);
        for (Index i = 0; i < o.xs[k + 1].size(); ++i) {
          if (o.xs[k + 1](i) != 0.0) EXPECT_GE(std::abs(o.xs[k + 1](i)), delta - 1e-10);
        }
        if (!same_support(o.xs[k], o.xs[k + 1])) {
          ++changes;
          EXPECT_GE(dx, delta - 1e-10);
        }
      }
      EXPECT_EQ(changes, r.support_changes);
      const double budget =
          std::floor(2.0 * (r.F_initial - e.F_global) / (gap_coeff * delta * delta));
      EXPECT_LE(static_cast<double>(r.support_changes), budget);
      EXPECT_GE(r.F_value, e.F_global - 1e-10);
      // Final-point invariants.
      for (Index i = 0; i < r.x_star.size(); ++i) {
        if (r.x_star(i) != 0.0) EXPECT_GE(std::abs(r.x_star(i)), delta - 1e-10);
      }
      EXPECT_DOUBLE_EQ(r.F_value,
                       r.f_value + p.lambda * static_cast<double>(
                                                  r.x_star.size() - r.support_zero.size()));
    }
  }
}

TEST(IhtProperties, FixedPointSoundness) {
  for (std::uint64_t seed = 40; seed <= 50; ++seed) {
    const Case c = random_case(seed, 6);
    const L0Problem& p = c.problem;
    IHTConfig cfg;
    const SolveReport r = iht_solve(p, cfg, c.x0);
    ASSERT_EQ(r.status, SolveStatus::Converged);
    const double L = cfg.L_factor * p.objective.lipschitz();
    const RestrictedBox X(p.box, r.support_zero);
    EXPECT_TRUE(certify_stationarity(p.objective, r.x_star, L, X, cfg.grad_tol).holds);
    const Vector again = hard_threshold_step(p.objective, r.x_star, p.box, p.lambda, L);
    EXPECT_TRUE(same_support(again, r.x_star));
    // The result is a local minimizer known to the enumeration.
    const OracleMatch m = nearest_local_min(enumerate_box(p), r.x_star);
    EXPECT_TRUE(m.support_equal);
    EXPECT_LE(m.distance, 1e-6);
  }
}

TEST(IhtProperties, StepIsCoordinatewiseOptimal) {
  Pcg32 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const Case c = random_case(1000 + trial, 5);
    const L0Problem& p = c.problem;
    const double L = (1.0 + rng.uniform()) * p.objective.lipschitz();
    const double lambda = 0.2 * rng.uniform();
    const Vector x = c.x0;
    const Vector next = hard_threshold_step(p.objective, x, p.box, lambda, L);
    const Vector g = p.objective.gradient(x);
    for (Index i = 0; i < x.size(); ++i) {
      const double l = p.box.lower()(i), u = p.box.upper()(i);
      const auto cost = [&](double t) {
        return g(i) * (t - x(i)) + 0.5 * L * (t - x(i)) * (t - x(i)) + (t != 0.0 ? lambda : 0.0);
      };
      const double got = cost(next(i));
      EXPECT_GE(next(i), l);
      EXPECT_LE(next(i), u);
      std::vector<double> cands{0.0, std::clamp(x(i) - g(i) / L, l, u)};
      for (int j = 0; j <= 10000; ++j) cands.push_back(l + (u - l) * j / 10000.0);
      for (double t : cands) EXPECT_LE(got, cost(t) + 1e-12) << "coord " << i << " t " << t;
    }
  }
}
