#include "skp/dual.hpp"

#include <cmath>
#include <stdexcept>

namespace skp {

double dual_objective(const Vector& y, const LinearSystemInstance& sys,
                      const Vector& x0) {
  if (y.size() != sys.rows() || x0.size() != sys.cols()) {
    throw std::invalid_argument("dual_objective: dimension mismatch");
  }
  const Vector at_y = sys.a().transpose() * y;
  return (sys.rhs() - sys.a() * x0).dot(y) -
         0.5 * at_y.dot(sys.apply_b_inv(at_y));
}

Vector dual_optimal_y(const LinearSystemInstance& sys, const Vector& x0) {
  return sys.gram_eig().pinv_apply(sys.rhs() - sys.a() * x0);
}

DualState make_dual_state(const Vector& x0, const SolverConfig& cfg) {
  DualState state{Vector(), x0, 0, RngStream(cfg.rng_seed, cfg.rng_stream)};
  state.y = Vector::Zero(0);  // sized on first step
  return state;
}

namespace {

void ensure_y(DualState& state, const LinearSystemInstance& sys) {
  if (state.y.size() == 0) state.y = Vector::Zero(sys.rows());
  if (state.y.size() != sys.rows() || state.x_image.size() != sys.cols()) {
    throw std::invalid_argument("dual state: dimension mismatch");
  }
}

/// Lift a primal-space error into the dual: z solves
/// (A B^{-1} A^T) z = A eps in the least-norm sense; B^{-1} A^T z is then the
/// B-orthogonal projection of eps onto range(B^{-1} A^T).
Vector lift_primal_error(const LinearSystemInstance& sys, const Vector& eps) {
  return sys.gram_eig().pinv_apply(sys.a() * eps);
}

}  // namespace

void isdsa_step(DualState& state, SketchSample& sample, const SolverConfig& cfg,
                const LinearSystemInstance& sys, const Vector& x_star,
                StepDiagnostics* diag) {
  ensure_y(state, sys);
  const Vector d = sample.sketched_residual(state.x_image);
  const Vector lambda = sample.least_norm(d);

  state.y += cfg.omega * sample.lift_s(lambda);
  state.x_image += cfg.omega * sample.primal_lift(lambda);

  switch (cfg.inexactness.mode) {
    case ErrorMode::kNone:
      if (diag != nullptr) {
        diag->eps_b_norm = 0.0;
        diag->eps_known = true;
      }
      break;
    case ErrorMode::kAbstractFixed:
    case ErrorMode::kAbstractSequence:
    case ErrorMode::kProportionalDistance: {
      double target = 0.0;
      const Vector eps_primal =
          draw_abstract_error(cfg.inexactness, state.k, sys, sample,
                              state.x_image, x_star, cfg.omega, state.rng,
                              &target);
      const Vector eps_dual = lift_primal_error(sys, eps_primal);
      const Vector achieved = sys.apply_b_inv(Vector(sys.a().transpose() * eps_dual));
      state.y += eps_dual;
      state.x_image += achieved;
      if (diag != nullptr) {
        diag->eps_b_norm = sys.b_norm(achieved);
        diag->eps_known = true;
      }
      break;
    }
    case ErrorMode::kStructured:
      throw std::logic_error(
          "isdsa_step: structured runs go through isdsa_structured_step");
    default:
      throw std::invalid_argument(
          "isdsa_step: this inexactness mode has no dual-space generator");
  }
  ++state.k;
}

void isdsa_structured_step(DualState& state, SketchSample& sample,
                           const InnerChoice& inner, const SolverConfig& cfg,
                           const LinearSystemInstance& sys,
                           StepDiagnostics* diag) {
  ensure_y(state, sys);
  Vector d = sample.sketched_residual(state.x_image);
  InnerSolveReport report = solve_inner(sample, d, inner, state.rng);
  state.y += cfg.omega * sample.lift_s(report.lambda);
  state.x_image += cfg.omega * sample.primal_lift(report.lambda);
  ++state.k;
  if (diag != nullptr) {
    diag->has_inner = true;
    diag->inner = std::move(report);
    diag->sketched_residual_d = std::move(d);
  }
}

SolverTrace run_dual_solver(const LinearSystemInstance& sys,
                            const SolverConfig& cfg, const Vector& x0,
                            const Vector* x_star_ref) {
  if (!(cfg.omega > 0.0 && cfg.omega < 2.0)) {
    throw std::invalid_argument("SolverConfig: omega must lie in (0, 2)");
  }
  if (x0.size() != sys.cols()) {
    throw std::invalid_argument("run_dual_solver: x0 dimension mismatch");
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

  DualState state = make_dual_state(x0, cfg);
  trace.rel_errors.push_back(1.0);

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
    if (cfg.inexactness.is_structured()) {
      isdsa_structured_step(state, sample, cfg.inexactness.inner, cfg, sys,
                            cfg.record_history ? &diag : nullptr);
    } else {
      isdsa_step(state, sample, cfg, sys, x_star,
                 cfg.record_history ? &diag : nullptr);
    }
    const auto t1 = Clock::now();

    trace.rel_errors.push_back(sys.b_norm_squared(state.x_image - x_star) /
                               initial_sq);
    if (cfg.record_history) {
      trace.step_seconds.push_back(
          std::chrono::duration<double>(t1 - t0).count());
      if (!diag.eps_known && diag.has_inner && cfg.record_epsilon) {
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

CorrespondenceReport verify_correspondence(const LinearSystemInstance& sys,
                                           const SolverConfig& cfg,
                                           const Vector& x0, Index horizon) {
  if (cfg.inexactness.mode != ErrorMode::kNone &&
      cfg.inexactness.mode != ErrorMode::kStructured) {
    throw std::invalid_argument(
        "verify_correspondence: only error-free and structured modes carry "
        "the primal/dual error relation by construction");
  }
  const Vector x_star = sys.project_onto_solutions(x0);

  SolverState primal = make_state(x0, cfg);
  DualState dual = make_dual_state(x0, cfg);
  RngStream sketch_rng(cfg.rng_seed, detail::splitmix64(cfg.rng_stream ^ 0x5eedull));

  CorrespondenceReport report;
  report.horizon = horizon;
  report.tolerance = 1e-8 * (1.0 + x0.norm());

  auto deviation = [&]() {
    const Vector image =
        dual.y.size() == 0
            ? x0
            : Vector(x0 + sys.apply_b_inv(Vector(sys.a().transpose() * dual.y)));
    return (primal.x - image).norm();
  };

  report.max_deviation = deviation();
  for (Index k = 0; k < horizon; ++k) {
    SketchSample sample = draw_sketch(cfg.dist, sys, sketch_rng);
    if (cfg.inexactness.is_structured()) {
      ibasic_structured_step(primal, sample, cfg.inexactness.inner, cfg, sys);
      isdsa_structured_step(dual, sample, cfg.inexactness.inner, cfg, sys);
    } else {
      ibasic_step(primal, sample, cfg, sys, x_star);
      isdsa_step(dual, sample, cfg, sys, x_star);
    }
    report.max_deviation = std::max(report.max_deviation, deviation());
  }
  report.ok = report.max_deviation <= report.tolerance;
  return report;
}

}  // namespace skp
