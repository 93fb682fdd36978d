#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <vector>

#include "skp/sketch.hpp"
#include "support.hpp"

using namespace skp;
using skp::testing::random_consistent;
using skp::testing::random_matrix;
using skp::testing::random_spd;
using skp::testing::random_vector;

TEST_CASE("full-block sketch reproduces the whole system") {
  LinearSystemInstance sys = random_consistent(4, 3, 1);
  RngStream rng(2, 0);
  SketchSample s =
      draw_sketch(SketchDistribution::block_uniform(4), sys, rng);
  CHECK(s.q() == 4);
  CHECK(s.indices() == std::vector<Index>{0, 1, 2, 3});
  const Matrix expected = sys.a() * sys.a().transpose();
  CHECK((s.dense_m() - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
}

TEST_CASE("same stream position gives identical samples") {
  LinearSystemInstance sys = random_consistent(6, 4, 3);
  const SketchDistribution dist = SketchDistribution::block_uniform(3);
  RngStream rng_a(5, 1), rng_b(5, 1);
  for (int i = 0; i < 10; ++i) {
    SketchSample a = draw_sketch(dist, sys, rng_a);
    SketchSample b = draw_sketch(dist, sys, rng_b);
    CHECK(a.indices() == b.indices());
  }
  RngStream rng_g1(5, 2), rng_g2(5, 2);
  SketchSample g1 = draw_sketch(SketchDistribution::gaussian(), sys, rng_g1);
  SketchSample g2 = draw_sketch(SketchDistribution::gaussian(), sys, rng_g2);
  CHECK((g1.gaussian_vector() - g2.gaussian_vector()).norm() == 0.0);
}

TEST_CASE("block subsets are uniform") {
  LinearSystemInstance sys = random_consistent(4, 3, 7);
  const SketchDistribution dist = SketchDistribution::block_uniform(2);
  RngStream rng(11, 0);
  const int n = 60000;
  std::map<std::vector<Index>, int> counts;
  for (int i = 0; i < n; ++i) counts[draw_sketch(dist, sys, rng).indices()]++;
  CHECK(counts.size() == 6);
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(p * (1 - p) / n);
  for (const auto& [subset, count] : counts) {
    CHECK(std::abs(count / double(n) - p) <= 3.0 * sigma);
  }
}

TEST_CASE("block M equals the dense submatrix") {
  LinearSystemInstance sys = random_consistent(7, 4, 13, /*dense_b=*/true);
  RngStream rng(17, 0);
  SketchSample s = draw_sketch(SketchDistribution::block_uniform(3), sys, rng);
  const Matrix direct =
      s.sketched_rows() *
      sys.apply_b_inv(Matrix(s.sketched_rows().transpose()));
  CHECK((s.dense_m() - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
}

TEST_CASE("stochastic function value identities") {
  LinearSystemInstance sys = random_consistent(6, 4, 19, /*dense_b=*/true);
  const Vector x_star = sys.project_onto_solutions(Vector::Zero(4));
  RngStream rng(23, 0);
  const SketchDistribution dist = SketchDistribution::block_uniform(2);

  for (int rep = 0; rep < 5; ++rep) {
    SketchSample s = draw_sketch(dist, sys, rng);
    const Vector x = random_vector(4, rng);

    // f_S(x) >= 0, zero at feasible points.
    const double f = stochastic_f_value(s, x);
    CHECK(f >= 0.0);
    CHECK(stochastic_f_value(s, x_star) <= 1e-18);

    // f_S(x) = 1/2 |grad f_S(x)|_B^2.
    const Vector g = stochastic_gradient(s, x);
    CHECK(f == doctest::Approx(0.5 * sys.b_norm_squared(g)).epsilon(1e-10));

    // f_S(x) = 1/2 (x - x*)^T Z (x - x*).
    const Vector diff = x - x_star;
    CHECK(f == doctest::Approx(0.5 * diff.dot(s.z_apply(diff))).epsilon(1e-10));
  }
}

TEST_CASE("gradient identities") {
  LinearSystemInstance sys = random_consistent(5, 5, 29, /*dense_b=*/true);
  RngStream rng(31, 0);
  const SketchDistribution dist = SketchDistribution::block_uniform(2);
  SketchSample s = draw_sketch(dist, sys, rng);

  {
    // Zero gradient at a solution.
    const Vector sol = sys.project_onto_solutions(Vector::Zero(5));
    CHECK(sys.b_norm(stochastic_gradient(s, sol)) <= 1e-9);
  }
  {
    // Central finite differences of f_S against the B-gradient: the
    // directional derivative in coordinate i equals (B grad)_i.
    const Vector x = random_vector(5, rng);
    const Vector bg = sys.apply_b(stochastic_gradient(s, x));
    const double h = 1e-6;
    for (Index i = 0; i < 5; ++i) {
      Vector e = Vector::Zero(5);
      e(i) = h;
      const double fd = (stochastic_f_value(s, Vector(x + e)) -
                         stochastic_f_value(s, Vector(x - e))) /
                        (2.0 * h);
      CHECK(fd == doctest::Approx(bg(i)).epsilon(1e-5).scale(1.0));
    }
  }
  {
    // Unit-stepsize step lands on the sketched-system projection.
    const Vector x = random_vector(5, rng);
    const Vector stepped = x - stochastic_gradient(s, x);
    const ProjectionResult proj =
        project_affine(x, s.sketched_rows(), s.sketched_rhs(), sys);
    CHECK((stepped - proj.point).norm() <= 1e-10);
  }
  {
    // B^{-1} Z is idempotent on random vectors.
    const Vector v = random_vector(5, rng);
    const Vector once = sys.apply_b_inv(s.z_apply(v));
    const Vector twice = sys.apply_b_inv(s.z_apply(once));
    CHECK((twice - once).norm() <= 1e-10 * (1.0 + once.norm()));
  }
}

TEST_CASE("gaussian sketches") {
  LinearSystemInstance sys = random_consistent(6, 3, 37);
  RngStream rng(41, 0);
  SketchSample s = draw_sketch(SketchDistribution::gaussian(), sys, rng);
  CHECK(s.q() == 1);
  const Vector x = random_vector(3, rng);
  CHECK(stochastic_f_value(s, x) >= 0.0);
  const Vector stepped = x - stochastic_gradient(s, x);
  const ProjectionResult proj =
      project_affine(x, s.sketched_rows(), s.sketched_rhs(), sys);
  CHECK((stepped - proj.point).norm() <= 1e-10);

  // Explicit SPD covariance accepted; mismatched size rejected.
  RngStream cov_rng(43, 0);
  const Matrix cov = random_spd(6, cov_rng);
  SketchSample sc = draw_sketch(SketchDistribution::gaussian(cov), sys, rng);
  CHECK(sc.q() == 1);
  CHECK_THROWS_AS(
      draw_sketch(SketchDistribution::gaussian(random_spd(4, cov_rng)), sys, rng),
      std::invalid_argument);
}

TEST_CASE("distribution validation and support") {
  LinearSystemInstance sys = random_consistent(4, 2, 43);
  RngStream rng(47, 0);
  CHECK_THROWS_AS(draw_sketch(SketchDistribution::block_uniform(5), sys, rng),
                  std::invalid_argument);

  const SketchDistribution dist = SketchDistribution::block_uniform(2);
  CHECK(dist.support_size(4).value() == 6);
  int atoms = 0;
  double total_p = 0.0;
  dist.for_each_support(4, [&](const std::vector<Index>& c, double p) {
    ++atoms;
    total_p += p;
    CHECK(c.size() == 2);
  });
  CHECK(atoms == 6);
  CHECK(total_p == doctest::Approx(1.0));

  CHECK_THROWS_AS(SketchDistribution::gaussian().for_each_support(
                      4, [](const std::vector<Index>&, double) {}),
                  std::invalid_argument);

  const SketchDistribution fixed =
      SketchDistribution::fixed_blocks({{0, 1}, {2, 3}, {1, 2}});
  CHECK(fixed.support_size(4).value() == 3);
  RngStream frng(49, 0);
  for (int i = 0; i < 10; ++i) {
    const auto idx = draw_sketch(fixed, sys, frng).indices();
    CHECK(idx.size() == 2);
  }
}
