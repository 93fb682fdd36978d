#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include <Eigen/Dense>

#include "skp/sym_eig.hpp"

namespace skp {

/// Result of a B-norm projection onto an affine set {z : A_sub z = b_sub}.
struct ProjectionResult {
  Vector point;
  double distance_b = 0.0;  // B-norm distance from the input to the projection
};

/// How the geometry matrix B is represented.
enum class BKind { kIdentity, kDense, kEqualToA };

/// A consistent linear system A x = b together with the SPD matrix B that
/// defines the geometry. Construction validates symmetry and positive
/// definiteness of B and consistency of the system (least-squares residual
/// below 1e-8 * (1 + |b|)). Instances are immutable after construction and
/// safe to share across concurrent solver runs; the lazily materialized
/// caches (Gram matrix, eigendecompositions) are built under std::call_once.
class LinearSystemInstance {
 public:
  /// B = identity.
  LinearSystemInstance(Matrix a, Vector b);
  /// Dense SPD B.
  LinearSystemInstance(Matrix a, Vector b, Matrix b_matrix);
  /// B = A; requires A symmetric positive definite (coordinate-descent
  /// geometry).
  static LinearSystemInstance with_b_equal_a(Matrix a, Vector b);

  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }

  const Matrix& a() const { return a_; }
  const Vector& rhs() const { return b_; }

  BKind b_kind() const { return b_kind_; }
  bool b_is_identity() const { return b_kind_ == BKind::kIdentity; }
  bool b_is_a() const { return b_kind_ == BKind::kEqualToA; }
  /// The matrix B (A itself for the equal-to-A kind). Throws for identity B;
  /// use the apply/solve entry points instead of materializing it.
  const Matrix& b_matrix() const;

  double b_inner(const Vector& x, const Vector& y) const;
  double b_norm_squared(const Vector& x) const { return b_inner(x, x); }
  double b_norm(const Vector& x) const;

  Vector apply_b(const Vector& v) const;
  Vector apply_b_inv(const Vector& v) const;
  Matrix apply_b_inv(const Matrix& v) const;
  /// B^{-1/2} v and B^{1/2} v (identity fast path; dense kinds use a cached
  /// eigendecomposition of B).
  Vector apply_b_inv_sqrt(const Vector& v) const;
  Vector apply_b_sqrt(const Vector& v) const;

  /// Condition number of B (reported, never capped).
  double condition_b() const;

  /// Cached eigendecomposition of B (dense kinds only; throws for identity).
  const SymmetricEig& b_eigendecomposition() const;

  Index rank_a() const { return rank_a_; }
  bool a_full_column_rank() const { return rank_a_ == cols(); }

  /// A B^{-1} A^T. Cached for row counts up to the cache limit; for the
  /// equal-to-A kind this is A itself. has_gram() tells whether the cache is
  /// (or would be) available without a fresh m x m build.
  bool has_gram() const;
  const Matrix& gram() const;
  const SymmetricEig& gram_eig() const;

  /// x* = argmin over {z : A z = b} of |z - x0|_B. Uses the unique solution
  /// when A has full column rank, otherwise the explicit projection through
  /// the Gram pseudoinverse.
  Vector project_onto_solutions(const Vector& x0) const;

  static constexpr Index kGramCacheLimit = 4096;

 private:
  LinearSystemInstance(Matrix a, Vector b, std::optional<Matrix> b_matrix,
                       BKind kind);
  void validate_and_factor();

  Matrix a_;
  Vector b_;
  Matrix b_dense_;  // only for BKind::kDense
  BKind b_kind_;

  Eigen::LLT<Matrix> b_llt_;  // of B (dense) or of A (equal-to-A)
  Eigen::ColPivHouseholderQR<Matrix> a_qr_;
  Index rank_a_ = 0;

  mutable std::once_flag gram_once_, gram_eig_once_, b_eig_once_;
  mutable std::unique_ptr<Matrix> gram_;
  mutable std::unique_ptr<SymmetricEig> gram_eig_;
  mutable std::unique_ptr<SymmetricEig> b_eig_;
};

/// x^T B y through the instance geometry (free-function form).
double b_inner(const Vector& x, const Vector& y, const LinearSystemInstance& sys);
double b_norm(const Vector& x, const LinearSystemInstance& sys);

/// Projection of x onto {z : A_sub z = b_sub} in the B-norm:
///   x - B^{-1} A_sub^T (A_sub B^{-1} A_sub^T)^dagger (A_sub x - b_sub).
/// Throws if (A_sub, b_sub) is inconsistent (the projected point fails to
/// satisfy the constraints to tolerance).
ProjectionResult project_affine(const Vector& x, const Matrix& a_sub,
                                const Vector& b_sub,
                                const LinearSystemInstance& sys);

}  // namespace skp
