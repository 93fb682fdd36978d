#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "skp/linear_system.hpp"
#include "skp/rng.hpp"

namespace skp {

/// Distribution over sketch matrices S (m rows). Block kinds draw column
/// subsets of the identity and are represented by index sets only; the
/// Gaussian kind draws a single random vector (q = 1).
class SketchDistribution {
 public:
  enum class Kind {
    kBlockUniform,    // |C| = block_size, C uniform over all subsets
    kSingleUniform,   // one row, uniform
    kGaussian,        // S = s ~ N(0, covariance), q = 1
    kFixedBlocks,     // uniform over an explicit list of index sets
  };

  static SketchDistribution block_uniform(Index block_size);
  static SketchDistribution single_uniform();
  static SketchDistribution gaussian();
  static SketchDistribution gaussian(Matrix covariance);
  static SketchDistribution fixed_blocks(std::vector<std::vector<Index>> blocks);

  Kind kind() const { return kind_; }
  /// Sketch column count for block kinds (fixed-blocks may vary per block).
  Index block_size() const { return block_size_; }
  const std::vector<std::vector<Index>>& blocks() const { return blocks_; }
  /// Lower Cholesky factor of the covariance; empty when the covariance is
  /// the identity.
  const Matrix& covariance_chol() const { return covariance_chol_; }

  bool finite_support() const { return kind_ != Kind::kGaussian; }
  /// Number of support atoms for a system with m rows, when finite and within
  /// `cap`; nullopt otherwise.
  std::optional<std::uint64_t> support_size(Index m,
                                            std::uint64_t cap = kSupportCap) const;
  /// Calls fn(indices, probability) for every support atom. Throws for the
  /// Gaussian kind or when the support exceeds `cap`.
  void for_each_support(
      Index m, const std::function<void(const std::vector<Index>&, double)>& fn,
      std::uint64_t cap = kSupportCap) const;

  /// Throws std::invalid_argument when incompatible with an m-row system
  /// (block size out of range, index out of range, covariance size).
  void validate_for(Index m) const;

  static constexpr std::uint64_t kSupportCap = 1000000;

 private:
  SketchDistribution() = default;

  Kind kind_ = Kind::kSingleUniform;
  Index block_size_ = 1;
  std::vector<std::vector<Index>> blocks_;
  Matrix covariance_;       // empty => identity
  Matrix covariance_chol_;  // lower factor, when covariance_ set
};

/// A realized sketch with its derived quantities. The sketched rows S^T A and
/// right-hand side S^T b are materialized at draw time; the q x q matrix
/// M = S^T A B^{-1} A^T S and its factorizations are built on demand (CG only
/// ever needs M-vector products, which fall back to an operator form when the
/// dense M has not been formed). A sample is confined to one thread; its
/// mathematical content never changes after the draw.
class SketchSample {
 public:
  Index q() const { return sk_rows_.rows(); }
  bool is_block() const { return !indices_.empty() || gauss_vec_.size() == 0; }
  const std::vector<Index>& indices() const { return indices_; }
  const Vector& gaussian_vector() const { return gauss_vec_; }

  const Matrix& sketched_rows() const { return sk_rows_; }  // S^T A
  const Vector& sketched_rhs() const { return sk_rhs_; }    // S^T b

  /// d = S^T (b - A x).
  Vector sketched_residual(const Vector& x) const;

  bool has_dense_m() const { return m_.size() > 0; }
  const Matrix& dense_m();
  /// M v, through the dense form when available, otherwise as
  /// S^T A (B^{-1} (A^T S v)).
  Vector m_apply(const Vector& v) const;

  /// Least-norm solve M^dagger d. Positive definite M goes through a cached
  /// Cholesky factor; otherwise (or when the Cholesky residual is not
  /// negligible) through the cached eigendecomposition.
  Vector least_norm(const Vector& d);
  const SymmetricEig& factor();

  /// Z v = A^T S M^dagger S^T A v.
  Vector z_apply(const Vector& v);

  /// B^{-1} A^T S lambda (the primal direction of a dual increment).
  Vector primal_lift(const Vector& lambda) const;
  /// S lambda as an m-vector.
  Vector lift_s(const Vector& lambda) const;

  const LinearSystemInstance& system() const { return *sys_; }

 private:
  friend SketchSample draw_sketch(const SketchDistribution&,
                                  const LinearSystemInstance&, RngStream&);
  friend SketchSample make_block_sample(const LinearSystemInstance&,
                                        std::vector<Index>);

  void init_block(const LinearSystemInstance& sys, std::vector<Index> indices);
  void init_gaussian(const LinearSystemInstance& sys,
                     const SketchDistribution& dist, Vector z);

  const LinearSystemInstance* sys_ = nullptr;
  std::vector<Index> indices_;  // block kinds
  Vector gauss_vec_;            // gaussian kind
  Matrix sk_rows_;
  Vector sk_rhs_;
  Matrix m_;  // empty until formed
  std::optional<Eigen::LLT<Matrix>> llt_;
  bool llt_attempted_ = false;
  std::optional<SymmetricEig> factor_;
};

/// Draws an independent sample; block-identity sketches never materialize S
/// densely. Throws when the distribution is incompatible with the system.
SketchSample draw_sketch(const SketchDistribution& dist,
                         const LinearSystemInstance& sys, RngStream& rng);

/// Deterministic sample for an explicit block (support enumeration, tests).
SketchSample make_block_sample(const LinearSystemInstance& sys,
                               std::vector<Index> indices);

/// Draws just the index set of a block/single/fixed distribution over m rows
/// (the nested inner solver and Monte-Carlo theta estimation need the indices
/// without a full sample). Throws for the Gaussian kind.
std::vector<Index> draw_index_set(const SketchDistribution& dist, Index m,
                                  RngStream& rng);

/// f_S(x) = 1/2 d^T M^dagger d with d = S^T (b - A x). Nonnegative; zero iff
/// x solves the sketched system.
double stochastic_f_value(SketchSample& sample, const Vector& x);

/// grad f_S(x) = B^{-1} A^T S M^dagger S^T (A x - b) in the B-geometry.
Vector stochastic_gradient(SketchSample& sample, const Vector& x);

/// Objective of the per-iteration dual problem
///   D_k(lambda) = d^T lambda - 1/2 |A^T S lambda|^2_{B^{-1}}
/// with d the sketched residual at the current iterate.
double inner_dual_value(SketchSample& sample, const Vector& d,
                        const Vector& lambda);

}  // namespace skp
