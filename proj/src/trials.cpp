#include "skp/trials.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skp {

namespace {

SolverTrace run_one(const LinearSystemInstance& sys, const SolverConfig& cfg,
                    const Vector& x0, const Vector& x_star, Index trial,
                    bool dual) {
  SolverConfig trial_cfg = cfg;
  trial_cfg.rng_stream = cfg.rng_stream + std::uint64_t(trial);
  return dual ? run_dual_solver(sys, trial_cfg, x0, &x_star)
              : run_solver(sys, trial_cfg, x0, &x_star);
}

}  // namespace

std::vector<SolverTrace> run_trials_serial(const LinearSystemInstance& sys,
                                           const SolverConfig& cfg,
                                           const Vector& x0, Index n_trials,
                                           const Vector* x_star_ref, bool dual) {
  if (n_trials < 1) throw std::invalid_argument("run_trials: n_trials >= 1");
  const Vector x_star =
      x_star_ref != nullptr ? *x_star_ref : sys.project_onto_solutions(x0);
  std::vector<SolverTrace> traces(std::size_t(n_trials));
  for (Index t = 0; t < n_trials; ++t) {
    traces[std::size_t(t)] = run_one(sys, cfg, x0, x_star, t, dual);
  }
  return traces;
}

std::vector<SolverTrace> run_trials(const LinearSystemInstance& sys,
                                    const SolverConfig& cfg, const Vector& x0,
                                    Index n_trials, const Vector* x_star_ref,
                                    bool dual) {
#ifndef _OPENMP
  return run_trials_serial(sys, cfg, x0, n_trials, x_star_ref, dual);
#else
  if (n_trials < 1) throw std::invalid_argument("run_trials: n_trials >= 1");
  const Vector x_star =
      x_star_ref != nullptr ? *x_star_ref : sys.project_onto_solutions(x0);
  // Build shared lazy caches up front rather than racing on first touch.
  if (sys.has_gram() &&
      cfg.dist.kind() != SketchDistribution::Kind::kGaussian) {
    (void)sys.gram();
  }
  std::vector<SolverTrace> traces(std::size_t(n_trials));
  std::string first_error;
#pragma omp parallel for schedule(dynamic)
  for (Index t = 0; t < n_trials; ++t) {
    try {
      traces[std::size_t(t)] = run_one(sys, cfg, x0, x_star, t, dual);
    } catch (const std::exception& e) {
#pragma omp critical
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) {
    throw std::runtime_error("run_trials: trial failed: " + first_error);
  }
  return traces;
#endif
}

EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& values) {
  if (values.empty()) throw std::invalid_argument("ensemble_stats: no trials");
  const std::size_t horizon = values.front().size();
  for (const auto& v : values) {
    if (v.size() != horizon) {
      throw std::invalid_argument("ensemble_stats: unequal horizons");
    }
  }
  const double n = double(values.size());
  EnsembleStats stats;
  stats.mean.resize(horizon);
  stats.standard_error.resize(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& v : values) {
      sum += v[k];
      sum_sq += v[k] * v[k];
    }
    const double mean = sum / n;
    stats.mean[k] = mean;
    if (values.size() > 1) {
      const double var =
          std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
      stats.standard_error[k] = std::sqrt(var / n);
    } else {
      stats.standard_error[k] = 0.0;
    }
  }
  return stats;
}

}  // namespace skp
