#pragma once

#include "l0iht/objective.hpp"
#include "l0iht/rng.hpp"

#include <gtest/gtest.h>

namespace l0iht::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

inline Vector random_vector(Pcg32& rng, Index n, double scale = 1.0) {
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = scale * rng.normal();
  return x;
}

inline Matrix random_matrix(Pcg32& rng, Index r, Index c, double scale = 1.0) {
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) M(i, j) = scale * rng.normal();
  }
  return M;
}

/// Random PSD matrix B'B + shift I.
inline Matrix random_psd(Pcg32& rng, Index n, double shift) {
  const Matrix B = random_matrix(rng, n, n);
  const Matrix M = B.transpose() * B;
  return 0.5 * (M + M.transpose()) + shift * Matrix::Identity(n, n);
}

inline void expect_vec_near(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (Index i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a(i), b(i), tol) << "index " << i;
  }
}

}  // namespace l0iht::testing
