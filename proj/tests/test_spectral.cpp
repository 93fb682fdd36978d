#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "skp/spectral.hpp"
#include "support.hpp"

using namespace skp;
using skp::testing::random_consistent;
using skp::testing::random_matrix;
using skp::testing::random_vector;

TEST_CASE("single-row sampling on the identity system") {
  // Two unit-vector sketches, each a rank-one projector: E[Z] = I/2.
  LinearSystemInstance sys(Matrix::Identity(2, 2), Vector::Zero(2));
  const SpectralSummary s =
      spectral_summary(sys, SketchDistribution::single_uniform());
  CHECK((s.w - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-14);
  CHECK(s.lambda_min_plus == doctest::Approx(0.5));
  CHECK(s.lambda_max == doctest::Approx(0.5));
  CHECK(s.exactness_ok);
}

TEST_CASE("full sketch gives unit nonzero eigenvalues") {
  LinearSystemInstance sys = random_consistent(5, 3, 61, /*dense_b=*/true);
  const SpectralSummary s =
      spectral_summary(sys, SketchDistribution::block_uniform(5));
  CHECK(s.rank_w == sys.rank_a());
  CHECK(s.lambda_min_plus == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.lambda_max <= 1.0 + 1e-10);
}

TEST_CASE("eigenvalues live in [0, 1]") {
  LinearSystemInstance sys = random_consistent(6, 4, 67, /*dense_b=*/true);
  const SpectralSummary s =
      spectral_summary(sys, SketchDistribution::block_uniform(2));
  CHECK(s.eigenvalues.minCoeff() >= -1e-10);
  CHECK(s.eigenvalues.maxCoeff() <= 1.0 + 1e-10);
  CHECK(s.exactness_ok);
}

TEST_CASE("serial and parallel enumeration agree") {
  LinearSystemInstance sys = random_consistent(8, 5, 71);
  const SketchDistribution dist = SketchDistribution::block_uniform(3);
  const Matrix serial = expected_projector_serial(sys, dist);
  const Matrix parallel = expected_projector_parallel(sys, dist);
  CHECK((serial - parallel).norm() <= 1e-12 * (1.0 + serial.norm()));
}

TEST_CASE("Monte-Carlo estimate approaches the enumerated expectation") {
  // 4x3 system, all C(4,2) = 6 blocks vs 1e5 sampled draws.
  LinearSystemInstance sys = random_consistent(4, 3, 73);
  const SketchDistribution dist = SketchDistribution::block_uniform(2);
  const SpectralSummary exact = spectral_summary(sys, dist);

  SpectralOptions mc;
  mc.exact_enumeration = false;
  mc.n_samples = 100000;
  mc.seed = 5;
  const SpectralSummary sampled = spectral_summary(sys, dist, mc);
  CHECK(sampled.samples_used == 100000);
  CHECK(sampled.mc_standard_error > 0.0);
  for (Index i = 0; i < exact.eigenvalues.size(); ++i) {
    CHECK(sampled.eigenvalues(i) ==
          doctest::Approx(exact.eigenvalues(i)).epsilon(1e-2).scale(1.0));
  }

  // Thread-count independent: serial accumulation gives the same estimate.
  SpectralOptions mc_serial = mc;
  mc_serial.parallel = false;
  mc_serial.n_samples = 2000;
  SpectralOptions mc_par = mc_serial;
  mc_par.parallel = true;
  const SpectralSummary a = spectral_summary(sys, dist, mc_serial);
  const SpectralSummary b = spectral_summary(sys, dist, mc_par);
  CHECK((a.w - b.w).norm() <= 1e-12 * (1.0 + a.w.norm()));
}

TEST_CASE("error paths") {
  LinearSystemInstance sys = random_consistent(4, 3, 79);
  SpectralOptions mc;
  mc.exact_enumeration = false;
  mc.n_samples = 0;
  CHECK_THROWS_AS(
      spectral_summary(sys, SketchDistribution::block_uniform(2), mc),
      std::invalid_argument);
  CHECK_THROWS_AS(spectral_summary(sys, SketchDistribution::gaussian()),
                  std::invalid_argument);
}

TEST_CASE("exactness flag trips on a support that misses rows") {
  // Blocks that never touch row 3 of a full-row-rank 4x4 system: the
  // expectation has rank 3 < rank(A) = 4.
  RngStream rng(83, 0);
  Matrix a = random_matrix(4, 4, rng);
  LinearSystemInstance sys(a, a * random_vector(4, rng));
  const SketchDistribution starved =
      SketchDistribution::fixed_blocks({{0, 1}, {1, 2}, {0, 2}});
  const SpectralSummary s = spectral_summary(sys, starved);
  CHECK(s.rank_w == 3);
  CHECK_FALSE(s.exactness_ok);
}
