#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "skp/inner_solvers.hpp"
#include "skp/spectral.hpp"
#include "support.hpp"

using namespace skp;
using skp::testing::random_consistent;
using skp::testing::random_matrix;
using skp::testing::random_vector;

namespace {

/// A sample whose M equals the given symmetric PSD matrix: built from the
/// system diag-embedded so M = A_C A_C^T = G. Simplest is a full block on a
/// system with A = chol-like factor; here we take A = G^{1/2} on all rows.
SketchSample sample_with_m(const LinearSystemInstance& sys) {
  std::vector<Index> all(sys.rows());
  for (Index i = 0; i < sys.rows(); ++i) all[i] = i;
  return make_block_sample(sys, all);
}

LinearSystemInstance system_for_m(const Matrix& m) {
  // A = V sqrt(D) V^T gives A A^T = M (B = I).
  const SymmetricEig eig = SymmetricEig::compute(m);
  Vector roots = eig.eigenvalues();
  for (Index i = 0; i < roots.size(); ++i) {
    roots(i) = roots(i) > eig.threshold() ? std::sqrt(roots(i)) : 0.0;
  }
  Matrix a = eig.eigenvectors() * roots.asDiagonal() *
             eig.eigenvectors().transpose();
  return LinearSystemInstance(a, Vector::Zero(m.rows()));
}

}  // namespace

TEST_CASE("exact least-norm solve") {
  {
    // Null component of d is annihilated.
    Matrix m = Vector{{4.0, 0.0}}.asDiagonal();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const InnerSolveReport rep = solve_exact_least_norm(s, Vector{{8.0, 0.0}});
    CHECK((rep.lambda - Vector{{2.0, 0.0}}).norm() <= 1e-12);
  }
  {
    // Least-norm property: |lambda| <= |w| for any w with M w = d.
    RngStream rng(3, 0);
    const Matrix g = random_matrix(5, 3, rng);
    const Matrix m = g * g.transpose();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const Vector w = random_vector(5, rng);
    const Vector d = m * w;
    const InnerSolveReport rep = solve_exact_least_norm(s, d);
    CHECK((m * rep.lambda - d).norm() <= 1e-10 * (1.0 + d.norm()));
    CHECK(rep.lambda.norm() <= w.norm() + 1e-12);
    // lambda lies in range(M).
    const Vector projected = s.factor().pinv_apply(Vector(m * rep.lambda));
    CHECK((projected - rep.lambda).norm() <= 1e-9 * (1.0 + rep.lambda.norm()));
  }
  {
    // Scalar case.
    Matrix m = Vector{{0.25}}.asDiagonal();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const InnerSolveReport rep = solve_exact_least_norm(s, Vector{{2.0}});
    CHECK(rep.lambda(0) == doctest::Approx(8.0));
  }
  {
    // d outside range(M) flags an inconsistent sketched system.
    Matrix m = Vector{{1.0, 0.0}}.asDiagonal();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    CHECK_THROWS_AS(solve_exact_least_norm(s, Vector{{0.0, 1.0}}),
                    std::runtime_error);
  }
}

TEST_CASE("truncated conjugate gradients") {
  RngStream rng(7, 0);
  {
    // Finite termination: r >= q solves exactly.
    const Matrix m = skp::testing::random_spd(6, rng);
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const Vector d = random_vector(6, rng);
    const InnerSolveReport rep = solve_cg(s, d, 6);
    CHECK((m * rep.lambda - d).norm() <= 1e-8 * (1.0 + d.norm()));
  }
  {
    // Identity M converges in one step.
    LinearSystemInstance sys = system_for_m(Matrix::Identity(4, 4));
    SketchSample s = sample_with_m(sys);
    const Vector d = random_vector(4, rng);
    const InnerSolveReport rep = solve_cg(s, d, 1);
    CHECK((rep.lambda - d).norm() <= 1e-12);
  }
  {
    // kappa-based contraction bound at r = 5 on a 20x20 PD system,
    // with lambda* from a direct solve as the oracle.
    const Matrix m = skp::testing::random_spd(20, rng, 1.0);
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const Vector d = random_vector(20, rng);
    const Vector lambda_star = m.llt().solve(d);
    const SymmetricEig eig = SymmetricEig::compute(m);
    const double kappa = eig.cond();
    const double factor = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);

    const InnerSolveReport rep = solve_cg(s, d, 5);
    auto m_norm = [&](const Vector& v) { return std::sqrt(v.dot(m * v)); };
    CHECK(m_norm(rep.lambda - lambda_star) <=
          std::pow(factor, 10.0) * m_norm(lambda_star) + 1e-12);

    // Monotone decrease of the M-norm error in r.
    double prev = m_norm(lambda_star);
    for (Index r = 1; r <= 8; ++r) {
      const InnerSolveReport step = solve_cg(s, d, r);
      const double err = m_norm(step.lambda - lambda_star);
      CHECK(err <= prev + 1e-10);
      prev = err;
    }
  }
  {
    // Singular M is refused with a pointer at nested-sp.
    Matrix m = Vector{{1.0, 0.0}}.asDiagonal();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    CHECK_THROWS_AS(solve_cg(s, Vector{{1.0, 1.0}}, 3), std::runtime_error);
  }
}

TEST_CASE("nested sketch-and-project") {
  RngStream rng(13, 0);
  {
    // Zero right-hand side stays at zero.
    const Matrix m = skp::testing::random_spd(5, rng);
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    RngStream inner_rng(1, 0);
    const InnerSolveReport rep = solve_nested_sp(
        s, Vector::Zero(5), 10, SketchDistribution::single_uniform(), inner_rng);
    CHECK(rep.lambda.norm() == 0.0);
  }
  {
    // Full-block inner sketch solves in one projection.
    const Matrix g = random_matrix(5, 3, rng);
    const Matrix m = g * g.transpose();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const Vector d = m * random_vector(5, rng);
    RngStream inner_rng(2, 0);
    const InnerSolveReport rep = solve_nested_sp(
        s, d, 1, SketchDistribution::block_uniform(5), inner_rng);
    const Vector lambda_star = s.least_norm(d);
    CHECK((rep.lambda - lambda_star).norm() <= 1e-10 * (1.0 + lambda_star.norm()));
  }
  {
    // Rank-6 10x10 M, single-coordinate inner sketches: mean M-norm-squared
    // error decreases with r and respects the nested system's own rate
    // theta-hat = 1 - lambda_min_plus(inner W).
    const Matrix g = random_matrix(10, 6, rng);
    const Matrix m = g * g.transpose();
    LinearSystemInstance sys = system_for_m(m);
    SketchSample s = sample_with_m(sys);
    const Vector d = m * random_vector(10, rng);
    const Vector lambda_star = s.least_norm(d);

    // The nested run is plain sketch-and-project on M lambda = d, so its own
    // spectral summary is computable from a system instance around M.
    LinearSystemInstance inner_sys(m, d);
    const SpectralSummary inner_spec =
        spectral_summary(inner_sys, SketchDistribution::single_uniform());
    const double theta_hat = 1.0 - inner_spec.lambda_min_plus;

    auto m_norm_sq = [&](const Vector& v) { return v.dot(m * v); };
    const double initial = m_norm_sq(lambda_star);

    const int trials = 100;
    double prev_mean = initial;
    for (Index r : {50, 100, 200}) {
      double mean = 0.0;
      for (int t = 0; t < trials; ++t) {
        RngStream inner_rng(77, std::uint64_t(t) * 1000 + std::uint64_t(r));
        const InnerSolveReport rep = solve_nested_sp(
            s, d, r, SketchDistribution::single_uniform(), inner_rng);
        mean += m_norm_sq(rep.lambda - lambda_star);
      }
      mean /= trials;
      CHECK(mean <= prev_mean + 1e-12);
      CHECK(mean <= std::pow(theta_hat, double(r)) * initial * 1.5 + 1e-12);
      prev_mean = mean;
    }
  }
}

TEST_CASE("inner dual-value and norm identities") {
  // Lemma-level identities tying the inner solve to the stochastic function:
  // |lambda*|_M^2 = 2 f_S(x); |eps|_B^2 = |lambda - lambda*|_M^2 (omega = 1);
  // D_k(lambda*) - D_k(lambda) = 1/2 |lambda - lambda*|_M^2.
  RngStream rng(19, 0);
  for (int rep = 0; rep < 10; ++rep) {
    LinearSystemInstance sys =
        random_consistent(6, 4, 100 + std::uint64_t(rep), rep % 2 == 0);
    RngStream draw_rng(7, std::uint64_t(rep));
    SketchSample s =
        draw_sketch(SketchDistribution::block_uniform(3), sys, draw_rng);
    const Vector x = random_vector(4, rng);
    const Vector d = s.sketched_residual(x);
    const Vector lambda_star = s.least_norm(d);

    const double f = stochastic_f_value(s, x);
    const double lhs = lambda_star.dot(s.m_apply(lambda_star));
    CHECK(lhs == doctest::Approx(2.0 * f).epsilon(1e-10));

    const InnerSolveReport approx = solve_cg(s, d, 1);
    const Vector gap = approx.lambda - lambda_star;
    const double gap_m_sq = gap.dot(s.m_apply(gap));

    const Vector eps = s.primal_lift(gap);
    CHECK(sys.b_norm_squared(eps) ==
          doctest::Approx(gap_m_sq).epsilon(1e-10).scale(1.0));

    const double dual_gap =
        inner_dual_value(s, d, lambda_star) - inner_dual_value(s, d, approx.lambda);
    CHECK(dual_gap == doctest::Approx(0.5 * gap_m_sq).epsilon(1e-10).scale(1.0));
  }
}
