#pragma once

#include "skp/solver.hpp"

namespace skp {

/// Dual iterate with its cached primal image x0 + B^{-1} A^T y, updated
/// incrementally alongside y.
struct DualState {
  Vector y;        // dimension m, starts at zero
  Vector x_image;  // dimension n
  Index k = 0;
  RngStream rng;
};

/// D(y) = (b - A x0)^T y - 1/2 |A^T y|^2_{B^{-1}}.
double dual_objective(const Vector& y, const LinearSystemInstance& sys,
                      const Vector& x0);

/// A dual-optimal point: y* = (A B^{-1} A^T)^dagger (b - A x0). D is evaluated
/// at it, so any optimal y serves.
Vector dual_optimal_y(const LinearSystemInstance& sys, const Vector& x0);

DualState make_dual_state(const Vector& x0, const SolverConfig& cfg);

/// One iSDSA step: y <- y + omega S M^dagger S^T (b - A(x0 + B^{-1}A^T y))
/// plus the dual error of the config's model. Abstract dual errors are
/// produced by drawing a primal-space error and lifting it through the
/// least-squares solve (A B^{-1} A^T) z = A eps, which keeps the achieved
/// primal-image error norm at or below the target bound.
void isdsa_step(DualState& state, SketchSample& sample, const SolverConfig& cfg,
                const LinearSystemInstance& sys, const Vector& x_star,
                StepDiagnostics* diag = nullptr);

/// One structured iSDSA step: inexact inner solve, then y <- y + omega S lambda.
void isdsa_structured_step(DualState& state, SketchSample& sample,
                           const InnerChoice& inner, const SolverConfig& cfg,
                           const LinearSystemInstance& sys,
                           StepDiagnostics* diag = nullptr);

/// Full dual run. The trace records the same relative-error measure as the
/// primal solver, taken on the primal image (by strong duality it equals the
/// dual-suboptimality ratio), so primal and dual runs share tooling.
SolverTrace run_dual_solver(const LinearSystemInstance& sys,
                            const SolverConfig& cfg, const Vector& x0,
                            const Vector* x_star_ref = nullptr);

struct CorrespondenceReport {
  double max_deviation = 0.0;  // max_k |x_k - (x0 + B^{-1} A^T y_k)|_2
  Index horizon = 0;
  bool ok = false;
  double tolerance = 0.0;
};

/// Runs iBasic and iSDSA side by side on an identical sketch sequence and
/// checks x_k = x0 + B^{-1} A^T y_k at every step, recomputing the image from
/// y directly. Supports the error-free and structured modes (the modes whose
/// primal/dual errors are linked by construction).
CorrespondenceReport verify_correspondence(const LinearSystemInstance& sys,
                                           const SolverConfig& cfg,
                                           const Vector& x0, Index horizon);

}  // namespace skp
