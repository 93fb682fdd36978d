#pragma once

#include "skp/dual.hpp"

namespace skp {

/// Monte-Carlo ensemble of independent solver runs. Trial t runs with the
/// config's rng stream offset by t, so the ensemble is reproducible and
/// independent of how trials are scheduled. x* is computed once and shared.
/// run_trials dispatches trials across OpenMP threads; run_trials_serial is
/// the reference loop the parallel path is tested against (they produce
/// identical traces).
std::vector<SolverTrace> run_trials(const LinearSystemInstance& sys,
                                    const SolverConfig& cfg, const Vector& x0,
                                    Index n_trials,
                                    const Vector* x_star_ref = nullptr,
                                    bool dual = false);

std::vector<SolverTrace> run_trials_serial(const LinearSystemInstance& sys,
                                           const SolverConfig& cfg,
                                           const Vector& x0, Index n_trials,
                                           const Vector* x_star_ref = nullptr,
                                           bool dual = false);

/// Per-iteration mean and standard error over equal-horizon value curves.
struct EnsembleStats {
  std::vector<double> mean;
  std::vector<double> standard_error;
};

EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& values);

}  // namespace skp
