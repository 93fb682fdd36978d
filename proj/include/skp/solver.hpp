#pragma once

#include <limits>
#include <vector>

#include "skp/inexactness.hpp"

namespace skp {

enum class Termination { kTolReached, kMaxIters, kDiverged };

struct SolverConfig {
  double omega = 1.0;  // must lie in (0, 2)
  Index max_iters = 1000;
  /// Relative-error stopping threshold on |x_k - x*|_B^2 / |x_0 - x*|_B^2.
  /// A non-positive value disables the tolerance stop (fixed-horizon runs).
  double rel_error_tol = 1e-5;
  SketchDistribution dist = SketchDistribution::single_uniform();
  InexactnessModel inexactness;
  bool record_history = true;
  /// In structured mode, recording |eps_k|_B needs the exact lambda* and so
  /// costs an extra exact inner solve per step. The diagnostic runs outside
  /// the step timer; benchmark configs leave it off.
  bool record_epsilon = false;
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_stream = 0;
};

struct SolverTrace {
  /// rel_errors[k] = |x_k - x*|_B^2 / |x_0 - x*|_B^2 for k = 0..iterations().
  std::vector<double> rel_errors;
  std::vector<double> step_seconds;  // per step, empty unless record_history
  std::vector<double> eps_norms;     // |eps_k|_B per step, ditto (NaN if unknown)
  Termination termination = Termination::kMaxIters;
  double initial_error_b = 0.0;  // |x_0 - x*|_B

  Index iterations() const { return Index(rel_errors.size()) - 1; }
  double final_rel_error() const { return rel_errors.back(); }
  double total_seconds() const;
};

/// Divergence guard: a run whose relative error passes this aborts with
/// Termination::kDiverged (possible under large abstract errors).
inline constexpr double kDivergenceGuard = 1e12;

struct SolverState {
  Vector x;
  Index k = 0;
  RngStream rng;
};

/// Per-step byproducts for tracing and tests.
struct StepDiagnostics {
  double eps_b_norm = std::numeric_limits<double>::quiet_NaN();
  bool eps_known = false;
  bool has_inner = false;
  InnerSolveReport inner;      // structured mode
  Vector sketched_residual_d;  // d = S^T(b - A x_k), structured mode
};

SolverState make_state(const Vector& x0, const SolverConfig& cfg);

/// One iBasic step: x <- x - omega grad f_S(x) + eps, with eps drawn from the
/// config's abstract inexactness model (zero for ErrorMode::kNone).
void ibasic_step(SolverState& state, SketchSample& sample,
                 const SolverConfig& cfg, const LinearSystemInstance& sys,
                 const Vector& x_star, StepDiagnostics* diag = nullptr);

/// One structured step: solve M lambda = S^T(b - A x) approximately with the
/// chosen inner solver, then x <- x + omega B^{-1} A^T S lambda. Equivalent to
/// ibasic_step with eps = omega B^{-1} A^T S (lambda - lambda*).
void ibasic_structured_step(SolverState& state, SketchSample& sample,
                            const InnerChoice& inner, const SolverConfig& cfg,
                            const LinearSystemInstance& sys,
                            StepDiagnostics* diag = nullptr);

/// Dispatches to the abstract or structured step per the config's model.
void solver_step(SolverState& state, SketchSample& sample,
                 const SolverConfig& cfg, const LinearSystemInstance& sys,
                 const Vector& x_star, StepDiagnostics* diag = nullptr);

/// Block-Kaczmarz facade: requires B = identity.
void irbk_step(SolverState& state, SketchSample& sample, const SolverConfig& cfg,
               const LinearSystemInstance& sys, const Vector& x_star,
               StepDiagnostics* diag = nullptr);

/// Block-coordinate-descent facade: requires B = A (A symmetric positive
/// definite).
void irbcd_step(SolverState& state, SketchSample& sample,
                const SolverConfig& cfg, const LinearSystemInstance& sys,
                const Vector& x_star, StepDiagnostics* diag = nullptr);

/// Full run. x* is taken from x_star_ref when given, otherwise computed once
/// as the B-projection of x0 onto the solution set. Identical config and seed
/// give identical traces.
SolverTrace run_solver(const LinearSystemInstance& sys, const SolverConfig& cfg,
                       const Vector& x0, const Vector* x_star_ref = nullptr);

}  // namespace skp
