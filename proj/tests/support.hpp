#pragma once

#include <cstdlib>
#include <string>

#include "skp/linear_system.hpp"
#include "skp/rng.hpp"

namespace skp::testing {

inline Matrix random_matrix(Index m, Index n, RngStream& rng) {
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return a;
}

inline Vector random_vector(Index n, RngStream& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

inline Matrix random_spd(Index n, RngStream& rng, double ridge = 0.5) {
  const Matrix g = random_matrix(n, n, rng);
  return g.transpose() * g + ridge * Matrix::Identity(n, n);
}

/// Consistent system with a planted solution and optional dense SPD B.
inline LinearSystemInstance random_consistent(Index m, Index n,
                                              std::uint64_t seed,
                                              bool dense_b = false) {
  RngStream rng(seed, 0);
  Matrix a = random_matrix(m, n, rng);
  const Vector z = random_vector(n, rng);
  Vector b = a * z;
  if (!dense_b) return LinearSystemInstance(std::move(a), std::move(b));
  Matrix bmat = random_spd(n, rng);
  return LinearSystemInstance(std::move(a), std::move(b), std::move(bmat));
}

inline std::string test_data_dir() {
  const char* dir = std::getenv("SKP_TEST_DATA");
  return dir != nullptr ? dir : "tests/data";
}

}  // namespace skp::testing
