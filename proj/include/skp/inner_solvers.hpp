#pragma once

#include <optional>

#include "skp/sketch.hpp"

namespace skp {

enum class InnerMethod { kExact, kCg, kNestedSp };

/// Which inner solver a structured run uses, and with how many iterations.
struct InnerChoice {
  InnerMethod method = InnerMethod::kExact;
  Index r = 1;
  SketchDistribution inner_dist = SketchDistribution::single_uniform();
};

/// Outcome of one inner solve of M lambda = d.
struct InnerSolveReport {
  Vector lambda;
  Index iterations_used = 0;
  double residual_norm = 0.0;  // |M lambda - d|_2
  InnerMethod method = InnerMethod::kExact;
  Index r = 0;
  std::optional<Vector> exact_lambda_opt;  // filled on request (tests)
};

/// lambda = M^dagger d, the minimum-Euclidean-norm solution. Throws when d is
/// significantly outside range(M) (an inconsistent sketched system, which a
/// consistent A x = b never produces). Any other solution of M lambda = d
/// would give the same outer convergence rate; the least-norm one is the
/// contract here.
InnerSolveReport solve_exact_least_norm(SketchSample& sample, const Vector& d);

struct CgOptions {
  bool early_exit = false;  // off by default: the analysis is per fixed r
  double early_exit_tol = 0.0;
};

/// r iterations of conjugate gradients from lambda = 0. Requires M positive
/// definite; breakdown (p^T M p <= 0) throws with a pointer at the nested
/// sketch-and-project solver.
InnerSolveReport solve_cg(SketchSample& sample, const Vector& d, Index r,
                          const CgOptions& opts = {});

/// r iterations of unit-stepsize sketch-and-project applied to M lambda = d
/// from lambda = 0 (so the iterates head for the least-norm solution). Works
/// on singular M. The inner distribution acts on the q rows of M.
InnerSolveReport solve_nested_sp(SketchSample& sample, const Vector& d, Index r,
                                 const SketchDistribution& inner_dist,
                                 RngStream& rng);

/// Dispatch on an InnerChoice.
InnerSolveReport solve_inner(SketchSample& sample, const Vector& d,
                             const InnerChoice& choice, RngStream& rng);

}  // namespace skp
