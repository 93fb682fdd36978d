#pragma once

#include <Eigen/Dense>

namespace skp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default relative rank threshold: eigenvalues at or below
/// rank_tol * lambda_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-12;

/// Eigendecomposition of a symmetric PSD matrix with a numerical rank cut,
/// used for pseudoinverse application and spectral queries.
class SymmetricEig {
 public:
  /// `rank_tol` is relative to the largest eigenvalue magnitude. Throws
  /// std::invalid_argument if M is not symmetric to tolerance.
  static SymmetricEig compute(const Matrix& m, double rank_tol = kDefaultRankTol);

  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

  Index rank() const { return rank_; }
  double lambda_max() const;
  /// Smallest eigenvalue above the rank threshold. Throws if rank is zero.
  double lambda_min_pos() const;
  /// lambda_max / lambda_min_pos (condition number on the range).
  double cond() const { return lambda_max() / lambda_min_pos(); }
  double threshold() const { return threshold_; }

  /// M^dagger v: invert eigenvalues above the threshold, zero the rest.
  Vector pinv_apply(const Vector& v) const;
  Matrix pinv() const;

  /// M^{1/2} v and M^{-1/2} v (the latter pseudo-inverted on the null space).
  Vector sqrt_apply(const Vector& v) const;
  Vector inv_sqrt_apply(const Vector& v) const;
  Matrix inv_sqrt() const;

 private:
  Vector eigenvalues_;   // nondecreasing
  Matrix eigenvectors_;
  double threshold_ = 0.0;
  Index rank_ = 0;
};

/// Verifies symmetry to `tol` relative to the max entry magnitude.
bool is_symmetric(const Matrix& m, double tol = 1e-10);

/// M^dagger v for symmetric PSD M (one-shot convenience wrapper).
Vector pseudoinverse_apply(const Matrix& m, const Vector& v,
                           double rank_tol = kDefaultRankTol);

}  // namespace skp
