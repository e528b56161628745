#pragma once

#include "l0iht/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace l0iht {

inline constexpr int kDefaultNCap = 12;

/// One restricted problem min{f(x) : x in B_I [, Ax - b in K*]}.
/// Bit i of `mask` is set iff i belongs to I.
struct SupportRecord {
  std::uint32_t mask = 0;
  IndexSet I;
  bool feasible = true;
  bool converged = true;
  Vector x;  ///< entries with |x_i| <= zero_tol are snapped to 0
  double f = 0.0;
  double F = 0.0;
  bool consistent = false;  ///< I(x) = I
  bool local_min = false;
  std::optional<double> mu_norm;
  Vector mu;
};

struct EnumerationResult {
  std::vector<SupportRecord> records;  ///< indexed by mask
  Vector x_global;
  double F_global = kInf;
  std::uint32_t global_mask = 0;
  std::vector<std::uint32_t> locals;  ///< masks of distinct local minimizers
  std::optional<double> t_hat;        ///< cone problems only
  double zero_tol = 0.0;
};

EnumerationResult enumerate_box(const L0Problem& problem, double tol = 1e-8,
                                int n_cap = kDefaultNCap);

EnumerationResult enumerate_cone(const ConeL0Problem& problem,
                                 double tol = 1e-8, int n_cap = kDefaultNCap);

struct OracleMatch {
  std::uint32_t mask = 0;
  double distance = kInf;
  bool support_equal = false;
};

/// Nearest local minimizer of the enumeration to x.
OracleMatch nearest_local_min(const EnumerationResult& e, const Vector& x);

struct ComplexityConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  long J_budget = 0;
  double F0 = 0.0;
  double F_star = 0.0;
  std::optional<double> gamma;
  std::optional<double> c;
  std::optional<double> d;
  std::optional<double> omega;
  std::optional<double> theta;
  std::vector<std::string> notes;
};

/// Constants of the IHT complexity bounds, evaluated over the restricted
/// minimizers in `e`. Logarithms are base 2. F_star defaults to the global
/// value of the enumeration.
ComplexityConstants complexity_constants(const L0Problem& problem, double L,
                                         const Vector& x0,
                                         const EnumerationResult& e,
                                         std::optional<double> F_star = {});

/// Max over i of |fd_i - g_i| / max(1, |g_i|) with central differences.
double fd_gradient_check(const ObjectiveOracle& f, const Vector& x, double h);

}  // namespace l0iht
