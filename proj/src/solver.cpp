#include "skp/solver.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace skp {

namespace {

void check_omega(const SolverConfig& cfg) {
  if (!(cfg.omega > 0.0 && cfg.omega < 2.0)) {
    throw std::invalid_argument("SolverConfig: omega must lie in (0, 2)");
  }
}

}  // namespace

double SolverTrace::total_seconds() const {
  return std::accumulate(step_seconds.begin(), step_seconds.end(), 0.0);
}

SolverState make_state(const Vector& x0, const SolverConfig& cfg) {
  return SolverState{x0, 0, RngStream(cfg.rng_seed, cfg.rng_stream)};
}

void ibasic_step(SolverState& state, SketchSample& sample,
                 const SolverConfig& cfg, const LinearSystemInstance& sys,
                 const Vector& x_star, StepDiagnostics* diag) {
  const Vector gradient = stochastic_gradient(sample, state.x);
  if (cfg.inexactness.mode == ErrorMode::kNone) {
    state.x -= cfg.omega * gradient;
    if (diag != nullptr) {
      diag->eps_b_norm = 0.0;
      diag->eps_known = true;
    }
  } else {
    double realized = 0.0;
    const Vector eps =
        draw_abstract_error(cfg.inexactness, state.k, sys, sample, state.x,
                            x_star, cfg.omega, state.rng, &realized);
    state.x += -cfg.omega * gradient + eps;
    if (diag != nullptr) {
      diag->eps_b_norm = realized;
      diag->eps_known = true;
    }
  }
  ++state.k;
}

void ibasic_structured_step(SolverState& state, SketchSample& sample,
                            const InnerChoice& inner, const SolverConfig& cfg,
                            const LinearSystemInstance& sys,
                            StepDiagnostics* diag) {
  Vector d = sample.sketched_residual(state.x);
  InnerSolveReport report = solve_inner(sample, d, inner, state.rng);
  state.x += cfg.omega * sample.primal_lift(report.lambda);
  ++state.k;
  (void)sys;
  if (diag != nullptr) {
    diag->has_inner = true;
    diag->inner = std::move(report);
    diag->sketched_residual_d = std::move(d);
  }
}

void solver_step(SolverState& state, SketchSample& sample,
                 const SolverConfig& cfg, const LinearSystemInstance& sys,
                 const Vector& x_star, StepDiagnostics* diag) {
  if (cfg.inexactness.is_structured()) {
    ibasic_structured_step(state, sample, cfg.inexactness.inner, cfg, sys, diag);
  } else {
    ibasic_step(state, sample, cfg, sys, x_star, diag);
  }
}

void irbk_step(SolverState& state, SketchSample& sample, const SolverConfig& cfg,
               const LinearSystemInstance& sys, const Vector& x_star,
               StepDiagnostics* diag) {
  if (!sys.b_is_identity()) {
    throw std::invalid_argument("irbk_step: block Kaczmarz requires B = identity");
  }
  solver_step(state, sample, cfg, sys, x_star, diag);
}

void irbcd_step(SolverState& state, SketchSample& sample,
                const SolverConfig& cfg, const LinearSystemInstance& sys,
                const Vector& x_star, StepDiagnostics* diag) {
  if (!sys.b_is_a()) {
    throw std::invalid_argument(
        "irbcd_step: block coordinate descent requires B = A with A symmetric "
        "positive definite");
  }
  solver_step(state, sample, cfg, sys, x_star, diag);
}

SolverTrace run_solver(const LinearSystemInstance& sys, const SolverConfig& cfg,
                       const Vector& x0, const Vector* x_star_ref) {
  check_omega(cfg);
  if (x0.size() != sys.cols()) {
    throw std::invalid_argument("run_solver: x0 dimension mismatch");
  }
  cfg.dist.validate_for(sys.rows());

  const Vector x_star =
      x_star_ref != nullptr ? *x_star_ref : sys.project_onto_solutions(x0);

  SolverTrace trace;
  const double initial_sq = sys.b_norm_squared(x0 - x_star);
  trace.initial_error_b = std::sqrt(std::max(0.0, initial_sq));

  if (initial_sq <= 0.0) {
    trace.rel_errors.push_back(0.0);
    trace.termination = Termination::kTolReached;
    return trace;
  }

  SolverState state = make_state(x0, cfg);
  trace.rel_errors.push_back(1.0);
  trace.termination = Termination::kMaxIters;

  using Clock = std::chrono::steady_clock;
  while (true) {
    const double rel = trace.rel_errors.back();
    if (cfg.rel_error_tol > 0.0 && rel <= cfg.rel_error_tol) {
      trace.termination = Termination::kTolReached;
      break;
    }
    if (rel > kDivergenceGuard) {
      trace.termination = Termination::kDiverged;
      break;
    }
    if (state.k >= cfg.max_iters) {
      trace.termination = Termination::kMaxIters;
      break;
    }

    StepDiagnostics diag;
    const auto t0 = Clock::now();
    SketchSample sample = draw_sketch(cfg.dist, sys, state.rng);
    solver_step(state, sample, cfg, sys, x_star,
                cfg.record_history ? &diag : nullptr);
    const auto t1 = Clock::now();

    trace.rel_errors.push_back(sys.b_norm_squared(state.x - x_star) /
                               initial_sq);
    if (cfg.record_history) {
      trace.step_seconds.push_back(
          std::chrono::duration<double>(t1 - t0).count());
      if (!diag.eps_known && diag.has_inner && cfg.record_epsilon) {
        // Off-timer diagnostic: omega |lambda - lambda*|_M.
        const Vector gap =
            diag.inner.lambda - sample.least_norm(diag.sketched_residual_d);
        diag.eps_b_norm =
            cfg.omega * std::sqrt(std::max(0.0, gap.dot(sample.m_apply(gap))));
        diag.eps_known = true;
      }
      trace.eps_norms.push_back(diag.eps_b_norm);
    }
  }
  return trace;
}

}  // namespace skp
