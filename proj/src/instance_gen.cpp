#include "l0iht/instance_gen.hpp"

#include "l0iht/rng.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace l0iht {

const char* to_string(ConeFamily f) {
  switch (f) {
    case ConeFamily::Nonneg: return "nonneg";
    case ConeFamily::Equality: return "equality";
    case ConeFamily::Soc: return "soc";
  }
  return "?";
}

ConeFamily cone_family_from_string(const std::string& name) {
  if (name == "nonneg") return ConeFamily::Nonneg;
  if (name == "equality") return ConeFamily::Equality;
  if (name == "soc") return ConeFamily::Soc;
  throw ParameterError("unknown cone family '" + name + "'");
}

namespace {

void validate(const InstanceSpec& s) {
  if (s.n < 1 || s.m < 1) throw ParameterError("gen: n and m must be >= 1");
  if (s.k < 0 || s.k > s.n) throw ParameterError("gen: need 0 <= k <= n");
  if (!(s.noise_sigma >= 0.0)) throw ParameterError("gen: noise_sigma >= 0");
  if (!(s.box_radius > 0.0)) throw ParameterError("gen: box_radius > 0");
  if (!(s.lambda >= 0.0) || !std::isfinite(s.lambda)) {
    throw ParameterError("gen: lambda must be finite and >= 0");
  }
  if (s.cone_rows < 0) throw ParameterError("gen: cone_rows >= 0");
}

// First `count` entries of a seeded Fisher-Yates shuffle of 0..n-1, sorted.
IndexSet draw_subset(Pcg32& rng, Index n, Index count) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index j = 0; j < count; ++j) {
    const Index r =
        j + static_cast<Index>(rng.index(static_cast<std::uint32_t>(n - j)));
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(r)]);
  }
  IndexSet out(idx.begin(), idx.begin() + count);
  std::sort(out.begin(), out.end());
  return out;
}

Matrix draw_gaussian(Pcg32& rng, Index rows, Index cols, double scale) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = scale * rng.normal();
  }
  return M;
}

struct LsDraw {
  Matrix A;
  Vector b;
  Vector x_true;
};

LsDraw draw_least_squares(const InstanceSpec& s, Pcg32& rng, bool positive) {
  LsDraw d;
  d.A = draw_gaussian(rng, s.m, s.n, 1.0 / std::sqrt(static_cast<double>(s.m)));
  d.x_true = Vector::Zero(s.n);
  const double amp = std::min(1.0, s.box_radius / 2.0);
  for (Index i : draw_subset(rng, s.n, s.k)) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    d.x_true(i) = (positive ? 1.0 : sign) * amp;
  }
  Vector noise(s.m);
  for (Index i = 0; i < s.m; ++i) noise(i) = rng.normal();
  d.b = d.A * d.x_true + s.noise_sigma * noise;
  return d;
}

L0Problem assemble(const InstanceSpec& s, LsDraw& d) {
  return {SmoothObjective::least_squares(d.A, d.b),
          ExtendedBox::symmetric(s.n, s.box_radius), s.lambda};
}

}  // namespace

LeastSquaresInstance gen_least_squares(const InstanceSpec& spec) {
  validate(spec);
  Pcg32 rng(spec.seed);
  LsDraw d = draw_least_squares(spec, rng, false);
  return {assemble(spec, d), d.x_true};
}

ConeInstance gen_cone(const InstanceSpec& spec) {
  validate(spec);
  if (!spec.cone_kind) throw ParameterError("gen_cone: cone_kind is required");
  const ConeFamily fam = *spec.cone_kind;
  const Index n = spec.n;
  std::vector<std::string> log;

  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t seed = spec.seed + attempt;
    Pcg32 rng(seed);
    LsDraw d = draw_least_squares(spec, rng, fam == ConeFamily::Nonneg);

    Matrix A;
    Vector b;
    ConeSpec cone;
    bool ok = true;
    switch (fam) {
      case ConeFamily::Nonneg: {
        const Index p = spec.cone_rows > 0 ? std::min(spec.cone_rows, n) : n;
        const IndexSet rows = draw_subset(rng, n, p);
        A = Matrix::Zero(p, n);
        for (Index r = 0; r < p; ++r) A(r, rows[static_cast<std::size_t>(r)]) = 1.0;
        b = Vector::Zero(p);
        cone = ConeSpec({{ConeKind::Nonneg, p}});
        ok = (A * d.x_true - b).minCoeff() >= 0.0;
        break;
      }
      case ConeFamily::Equality: {
        const Index p = spec.cone_rows > 0 ? spec.cone_rows : 1;
        if (p >= n) throw ParameterError("gen_cone: equality rows must be < n");
        // Entries bounded away from zero keep restricted multipliers tame.
        A.resize(p, n);
        for (Index i = 0; i < p; ++i) {
          for (Index j = 0; j < n; ++j) {
            const double mag = 0.5 + 0.5 * rng.uniform();
            A(i, j) = rng.uniform() < 0.5 ? -mag : mag;
          }
        }
        b = A * d.x_true;
        cone = ConeSpec({{ConeKind::Free, p}});
        ok = Eigen::FullPivLU<Matrix>(A).rank() == p;
        break;
      }
      case ConeFamily::Soc: {
        const Index p = spec.cone_rows > 0 ? spec.cone_rows : std::max<Index>(1, n / 2);
        const double sc = 1.0 / std::sqrt(static_cast<double>(n));
        const Matrix P = draw_gaussian(rng, p, n, sc);
        Vector q(p);
        for (Index i = 0; i < p; ++i) q(i) = 0.1 * rng.normal();
        Vector r(n);
        for (Index i = 0; i < n; ++i) r(i) = sc * rng.normal();
        // Strictly feasible at 0; x_true sits on the boundary when possible.
        const double s = std::max(q.norm() + 0.1,
                                  (P * d.x_true - q).norm() - r.dot(d.x_true));
        A.resize(p + 1, n);
        A.row(0) = r.transpose();
        A.bottomRows(p) = P;
        b.resize(p + 1);
        b(0) = -s;
        b.tail(p) = q;
        cone = ConeSpec({{ConeKind::SecondOrder, p + 1}});
        ok = cone.dist_dual(A * d.x_true - b) <= 1e-12;
        break;
      }
    }
    if (!ok) {
      log.push_back("seed " + std::to_string(seed) +
                    ": generated constraint violated at x_true, regenerating");
      continue;
    }
    L0Problem base = assemble(spec, d);
    return {ConeL0Problem(std::move(base.objective), std::move(base.box),
                          spec.lambda, std::move(A), std::move(b),
                          std::move(cone)),
            d.x_true, seed, std::move(log)};
  }
  throw Error("gen_cone: no feasible instance after 100 seeds");
}

}  // namespace l0iht
