#include "skp/sym_eig.hpp"

#include <cmath>
#include <stdexcept>

namespace skp {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

SymmetricEig SymmetricEig::compute(const Matrix& m, double rank_tol) {
  if (!is_symmetric(m)) {
    throw std::invalid_argument("SymmetricEig: matrix is not symmetric");
  }
  if (!(rank_tol > 0.0)) {
    throw std::invalid_argument("SymmetricEig: rank_tol must be positive");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("SymmetricEig: eigendecomposition failed");
  }
  SymmetricEig out;
  out.eigenvalues_ = es.eigenvalues();
  out.eigenvectors_ = es.eigenvectors();
  const double lmax = out.eigenvalues_.cwiseAbs().maxCoeff();
  out.threshold_ = rank_tol * lmax;
  out.rank_ = (out.eigenvalues_.array() > out.threshold_).count();
  return out;
}

double SymmetricEig::lambda_max() const {
  return eigenvalues_(eigenvalues_.size() - 1);
}

double SymmetricEig::lambda_min_pos() const {
  if (rank_ == 0) throw std::runtime_error("SymmetricEig: zero-rank matrix");
  return eigenvalues_(eigenvalues_.size() - rank_);
}

Vector SymmetricEig::pinv_apply(const Vector& v) const {
  Vector coeffs = eigenvectors_.transpose() * v;
  for (Index i = 0; i < coeffs.size(); ++i) {
    coeffs(i) = eigenvalues_(i) > threshold_ ? coeffs(i) / eigenvalues_(i) : 0.0;
  }
  return eigenvectors_ * coeffs;
}

Matrix SymmetricEig::pinv() const {
  Vector inv = eigenvalues_;
  for (Index i = 0; i < inv.size(); ++i) {
    inv(i) = eigenvalues_(i) > threshold_ ? 1.0 / eigenvalues_(i) : 0.0;
  }
  return eigenvectors_ * inv.asDiagonal() * eigenvectors_.transpose();
}

Vector SymmetricEig::sqrt_apply(const Vector& v) const {
  Vector coeffs = eigenvectors_.transpose() * v;
  for (Index i = 0; i < coeffs.size(); ++i) {
    coeffs(i) *= eigenvalues_(i) > threshold_ ? std::sqrt(eigenvalues_(i)) : 0.0;
  }
  return eigenvectors_ * coeffs;
}

Vector SymmetricEig::inv_sqrt_apply(const Vector& v) const {
  Vector coeffs = eigenvectors_.transpose() * v;
  for (Index i = 0; i < coeffs.size(); ++i) {
    coeffs(i) =
        eigenvalues_(i) > threshold_ ? coeffs(i) / std::sqrt(eigenvalues_(i)) : 0.0;
  }
  return eigenvectors_ * coeffs;
}

Matrix SymmetricEig::inv_sqrt() const {
  Vector inv = eigenvalues_;
  for (Index i = 0; i < inv.size(); ++i) {
    inv(i) = eigenvalues_(i) > threshold_ ? 1.0 / std::sqrt(eigenvalues_(i)) : 0.0;
  }
  return eigenvectors_ * inv.asDiagonal() * eigenvectors_.transpose();
}

Vector pseudoinverse_apply(const Matrix& m, const Vector& v, double rank_tol) {
  if (m.rows() != v.size()) {
    throw std::invalid_argument("pseudoinverse_apply: dimension mismatch");
  }
  return SymmetricEig::compute(m, rank_tol).pinv_apply(v);
}

}  // namespace skp
