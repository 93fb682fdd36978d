#include "skp/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skp {

namespace {

/// Z(S) = A^T S M^dagger S^T A for one block atom.
Matrix projector_for_block(const LinearSystemInstance& sys,
                           const std::vector<Index>& indices) {
  SketchSample sample = make_block_sample(sys, indices);
  const Matrix pinv = sample.factor().pinv();
  return sample.sketched_rows().transpose() * pinv * sample.sketched_rows();
}

Matrix projector_for_sample(SketchSample& sample) {
  const Matrix pinv = sample.factor().pinv();
  return sample.sketched_rows().transpose() * pinv * sample.sketched_rows();
}

}  // namespace

Matrix expected_projector_serial(const LinearSystemInstance& sys,
                                 const SketchDistribution& dist) {
  Matrix acc = Matrix::Zero(sys.cols(), sys.cols());
  dist.for_each_support(sys.rows(),
                        [&](const std::vector<Index>& indices, double p) {
                          acc += p * projector_for_block(sys, indices);
                        });
  return acc;
}

Matrix expected_projector_parallel(const LinearSystemInstance& sys,
                                   const SketchDistribution& dist) {
#ifndef _OPENMP
  return expected_projector_serial(sys, dist);
#else
  // Materialize the support so the atoms can be split across threads.
  std::vector<std::vector<Index>> atoms;
  std::vector<double> probs;
  dist.for_each_support(sys.rows(),
                        [&](const std::vector<Index>& indices, double p) {
                          atoms.push_back(indices);
                          probs.push_back(p);
                        });
  const int max_threads = omp_get_max_threads();
  std::vector<Matrix> partial(max_threads,
                              Matrix::Zero(sys.cols(), sys.cols()));
  // Touching sys.gram() once up front keeps the lazy build out of the region.
  if (sys.has_gram()) (void)sys.gram();
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < std::int64_t(atoms.size()); ++i) {
    partial[omp_get_thread_num()] += probs[i] * projector_for_block(sys, atoms[i]);
  }
  Matrix acc = Matrix::Zero(sys.cols(), sys.cols());
  for (const Matrix& part : partial) acc += part;
  return acc;
#endif
}

Matrix expected_projector_mc(const LinearSystemInstance& sys,
                             const SketchDistribution& dist,
                             std::uint64_t n_samples, std::uint64_t seed,
                             std::uint64_t stream, bool parallel,
                             double* standard_error) {
  if (n_samples == 0) {
    throw std::invalid_argument("expected_projector_mc: n_samples must be > 0");
  }
  dist.validate_for(sys.rows());
  const Index n = sys.cols();
  const RngStream root(seed, stream);
  if (sys.has_gram()) (void)sys.gram();

  Matrix sum = Matrix::Zero(n, n);
  Matrix sum_sq = Matrix::Zero(n, n);

  auto accumulate_range = [&](std::uint64_t begin, std::uint64_t end,
                              Matrix& local_sum, Matrix& local_sq) {
    for (std::uint64_t i = begin; i < end; ++i) {
      RngStream rng = root.substream(i);
      SketchSample sample = draw_sketch(dist, sys, rng);
      const Matrix z = projector_for_sample(sample);
      local_sum += z;
      local_sq += z.cwiseProduct(z);
    }
  };

#ifdef _OPENMP
  if (parallel) {
    const int max_threads = omp_get_max_threads();
    std::vector<Matrix> partial(max_threads, Matrix::Zero(n, n));
    std::vector<Matrix> partial_sq(max_threads, Matrix::Zero(n, n));
#pragma omp parallel
    {
      const int tid = omp_get_thread_num();
      const int nth = omp_get_num_threads();
      const std::uint64_t chunk = (n_samples + nth - 1) / nth;
      const std::uint64_t begin = std::uint64_t(tid) * chunk;
      const std::uint64_t end = std::min(n_samples, begin + chunk);
      if (begin < end) accumulate_range(begin, end, partial[tid], partial_sq[tid]);
    }
    for (int t = 0; t < max_threads; ++t) {
      sum += partial[t];
      sum_sq += partial_sq[t];
    }
  } else
#endif
  {
    (void)parallel;
    accumulate_range(0, n_samples, sum, sum_sq);
  }

  const double inv_n = 1.0 / double(n_samples);
  Matrix mean = sum * inv_n;
  if (standard_error != nullptr) {
    if (n_samples < 2) {
      *standard_error = 0.0;
    } else {
      Matrix var = (sum_sq * inv_n - mean.cwiseProduct(mean)) *
                   (double(n_samples) / double(n_samples - 1));
      *standard_error =
          (var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(double(n_samples))).mean();
    }
  }
  return mean;
}

SpectralSummary spectral_summary(const LinearSystemInstance& sys,
                                 const SketchDistribution& dist,
                                 const SpectralOptions& opts) {
  Matrix expected_z;
  SpectralSummary out;
  out.samples_used = 0;
  out.mc_standard_error = 0.0;

  if (opts.exact_enumeration) {
    expected_z = opts.parallel ? expected_projector_parallel(sys, dist)
                               : expected_projector_serial(sys, dist);
  } else {
    expected_z =
        expected_projector_mc(sys, dist, opts.n_samples, opts.seed, opts.stream,
                              opts.parallel, &out.mc_standard_error);
    out.samples_used = opts.n_samples;
  }

  if (sys.b_is_identity()) {
    out.w = 0.5 * (expected_z + expected_z.transpose());
  } else {
    const Matrix inv_sqrt = sys.b_eigendecomposition().inv_sqrt();
    Matrix w = inv_sqrt * expected_z * inv_sqrt;
    out.w = 0.5 * (w + w.transpose());
  }

  const SymmetricEig eig = SymmetricEig::compute(out.w, opts.rank_tol);
  out.eigenvalues = eig.eigenvalues();
  out.lambda_max = eig.lambda_max();
  out.rank_w = eig.rank();
  if (out.rank_w == 0) {
    throw std::runtime_error("spectral_summary: E[Z] is numerically zero");
  }
  out.lambda_min_plus = eig.lambda_min_pos();
  out.rank_a = sys.rank_a();
  out.exactness_ok = (out.rank_w == out.rank_a);
  return out;
}

}  // namespace skp
