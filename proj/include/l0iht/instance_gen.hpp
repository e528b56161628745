#pragma once

#include "l0iht/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace l0iht {

enum class ConeFamily { Nonneg, Equality, Soc };

const char* to_string(ConeFamily f);
ConeFamily cone_family_from_string(const std::string& name);

struct InstanceSpec {
  Index n = 10;
  Index m = 20;
  Index k = 3;
  double noise_sigma = 0.0;
  double box_radius = 5.0;  ///< may be +inf
  std::optional<ConeFamily> cone_kind;
  std::uint64_t seed = 0;
  double lambda = 0.1;
  /// Constraint rows for cone families; 0 picks a default per family.
  Index cone_rows = 0;
};

struct LeastSquaresInstance {
  L0Problem problem;
  Vector x_true;
};

struct ConeInstance {
  ConeL0Problem problem;
  Vector x_true;
  std::uint64_t seed_used;  ///< differs from spec.seed after regeneration
  std::vector<std::string> log;
};

LeastSquaresInstance gen_least_squares(const InstanceSpec& spec);
ConeInstance gen_cone(const InstanceSpec& spec);

}  // namespace l0iht
