#pragma once

#include <cstdint>

#include "skp/sketch.hpp"

namespace skp {

/// Spectrum of W = B^{-1/2} E[Z] B^{-1/2}, the matrix whose smallest nonzero
/// eigenvalue drives every convergence certificate.
struct SpectralSummary {
  Matrix w;
  Vector eigenvalues;      // nondecreasing
  double lambda_min_plus;  // smallest eigenvalue above rank_tol * lambda_max
  double lambda_max;
  Index rank_w;
  Index rank_a;
  bool exactness_ok;       // rank(E[Z]) == rank(A)
  std::uint64_t samples_used;  // 0 when E[Z] was enumerated exactly
  double mc_standard_error;    // mean entrywise standard error (MC mode only)
};

struct SpectralOptions {
  bool exact_enumeration = true;
  std::uint64_t n_samples = 0;  // Monte-Carlo sample count (MC mode)
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool parallel = true;
  double rank_tol = kDefaultRankTol;
};

/// E[Z] by exact support enumeration. Serial reference implementation.
Matrix expected_projector_serial(const LinearSystemInstance& sys,
                                 const SketchDistribution& dist);
/// Same expectation, accumulated across OpenMP threads.
Matrix expected_projector_parallel(const LinearSystemInstance& sys,
                                   const SketchDistribution& dist);

/// Monte-Carlo estimate of E[Z] over n_samples independent draws; each sample
/// owns a counter-derived substream, so the estimate does not depend on the
/// thread count (up to summation order). Optionally reports the mean
/// entrywise standard error.
Matrix expected_projector_mc(const LinearSystemInstance& sys,
                             const SketchDistribution& dist,
                             std::uint64_t n_samples, std::uint64_t seed,
                             std::uint64_t stream, bool parallel,
                             double* standard_error = nullptr);

/// Full spectral summary. Enumeration mode requires a finite support (throws
/// for Gaussian sketches or oversized supports); MC mode requires
/// n_samples > 0.
SpectralSummary spectral_summary(const LinearSystemInstance& sys,
                                 const SketchDistribution& dist,
                                 const SpectralOptions& opts = {});

}  // namespace skp
