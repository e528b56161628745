#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace l0iht {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted, duplicate-free list of 0-based coordinate indices.
using IndexSet = std::vector<Index>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SolveStatus { Converged, IterationCapped };

inline const char* to_string(SolveStatus s) {
  return s == SolveStatus::Converged ? "converged" : "iteration-capped";
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Raised when a problem lies outside the families a solver handles.
class UnsupportedProblem : public Error {
 public:
  using Error::Error;
};

/// A runtime check of a proven property failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_bound)
      : Error(what), best_bound_(best_bound) {}
  double best_bound() const noexcept { return best_bound_; }

 private:
  double best_bound_;
};

inline void require_dim(Index got, Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(want) + ", got " +
                         std::to_string(got));
  }
}

}  // namespace l0iht
