#include "skp/linear_system.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace skp {

LinearSystemInstance::LinearSystemInstance(Matrix a, Vector b)
    : LinearSystemInstance(std::move(a), std::move(b), std::nullopt,
                           BKind::kIdentity) {}

LinearSystemInstance::LinearSystemInstance(Matrix a, Vector b, Matrix b_matrix)
    : LinearSystemInstance(std::move(a), std::move(b), std::move(b_matrix),
                           BKind::kDense) {}

LinearSystemInstance LinearSystemInstance::with_b_equal_a(Matrix a, Vector b) {
  return LinearSystemInstance(std::move(a), std::move(b), std::nullopt,
                              BKind::kEqualToA);
}

LinearSystemInstance::LinearSystemInstance(Matrix a, Vector b,
                                           std::optional<Matrix> b_matrix,
                                           BKind kind)
    : a_(std::move(a)), b_(std::move(b)), b_kind_(kind) {
  if (b_matrix.has_value()) b_dense_ = std::move(*b_matrix);
  validate_and_factor();
}

void LinearSystemInstance::validate_and_factor() {
  if (a_.rows() != b_.size()) {
    throw std::invalid_argument("LinearSystemInstance: A rows != b size");
  }
  const Matrix* b_ref = nullptr;
  switch (b_kind_) {
    case BKind::kIdentity:
      break;
    case BKind::kDense:
      if (b_dense_.rows() != cols() || b_dense_.cols() != cols()) {
        throw std::invalid_argument("LinearSystemInstance: B must be n x n");
      }
      b_ref = &b_dense_;
      break;
    case BKind::kEqualToA:
      if (a_.rows() != a_.cols()) {
        throw std::invalid_argument(
            "LinearSystemInstance: B = A requires a square matrix");
      }
      b_ref = &a_;
      break;
  }
  if (b_ref != nullptr) {
    if (!is_symmetric(*b_ref)) {
      throw std::invalid_argument("LinearSystemInstance: B is not symmetric");
    }
    b_llt_.compute(*b_ref);
    if (b_llt_.info() != Eigen::Success) {
      throw std::invalid_argument(
          "LinearSystemInstance: B is not positive definite");
    }
  }

  a_qr_.compute(a_);
  rank_a_ = a_qr_.rank();
  const Vector least_squares = a_qr_.solve(b_);
  const double residual = (a_ * least_squares - b_).norm();
  if (residual > 1e-8 * (1.0 + b_.norm())) {
    throw std::invalid_argument(
        "LinearSystemInstance: system is inconsistent (least-squares residual " +
        std::to_string(residual) + ")");
  }
}

const Matrix& LinearSystemInstance::b_matrix() const {
  switch (b_kind_) {
    case BKind::kDense:
      return b_dense_;
    case BKind::kEqualToA:
      return a_;
    default:
      throw std::logic_error("b_matrix(): B is the identity; no dense form");
  }
}

double LinearSystemInstance::b_inner(const Vector& x, const Vector& y) const {
  if (x.size() != cols() || y.size() != cols()) {
    throw std::invalid_argument("b_inner: dimension mismatch");
  }
  if (b_is_identity()) return x.dot(y);
  return x.dot(b_matrix() * y);
}

double LinearSystemInstance::b_norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, b_norm_squared(x)));
}

Vector LinearSystemInstance::apply_b(const Vector& v) const {
  if (b_is_identity()) return v;
  return b_matrix() * v;
}

Vector LinearSystemInstance::apply_b_inv(const Vector& v) const {
  if (b_is_identity()) return v;
  return b_llt_.solve(v);
}

Matrix LinearSystemInstance::apply_b_inv(const Matrix& v) const {
  if (b_is_identity()) return v;
  return b_llt_.solve(v);
}

const SymmetricEig& LinearSystemInstance::b_eigendecomposition() const {
  if (b_is_identity()) {
    throw std::logic_error(
        "b_eigendecomposition(): identity B has no cached decomposition");
  }
  std::call_once(b_eig_once_, [this] {
    b_eig_ = std::make_unique<SymmetricEig>(SymmetricEig::compute(b_matrix()));
  });
  return *b_eig_;
}

Vector LinearSystemInstance::apply_b_inv_sqrt(const Vector& v) const {
  if (b_is_identity()) return v;
  return b_eigendecomposition().inv_sqrt_apply(v);
}

Vector LinearSystemInstance::apply_b_sqrt(const Vector& v) const {
  if (b_is_identity()) return v;
  return b_eigendecomposition().sqrt_apply(v);
}

double LinearSystemInstance::condition_b() const {
  if (b_is_identity()) return 1.0;
  return b_eigendecomposition().cond();
}

bool LinearSystemInstance::has_gram() const {
  return b_is_a() || rows() <= kGramCacheLimit;
}

const Matrix& LinearSystemInstance::gram() const {
  if (b_is_a()) return a_;  // A B^{-1} A^T = A when B = A
  if (rows() > kGramCacheLimit) {
    throw std::runtime_error("gram(): row count exceeds the cache limit");
  }
  std::call_once(gram_once_, [this] {
    Matrix binv_at = apply_b_inv(Matrix(a_.transpose()));
    gram_ = std::make_unique<Matrix>(a_ * binv_at);
  });
  return *gram_;
}

const SymmetricEig& LinearSystemInstance::gram_eig() const {
  std::call_once(gram_eig_once_, [this] {
    gram_eig_ = std::make_unique<SymmetricEig>(SymmetricEig::compute(gram()));
  });
  return *gram_eig_;
}

Vector LinearSystemInstance::project_onto_solutions(const Vector& x0) const {
  if (x0.size() != cols()) {
    throw std::invalid_argument("project_onto_solutions: dimension mismatch");
  }
  if (a_full_column_rank()) return a_qr_.solve(b_);
  const Vector scaled = gram_eig().pinv_apply(a_ * x0 - b_);
  return x0 - apply_b_inv(Vector(a_.transpose() * scaled));
}

double b_inner(const Vector& x, const Vector& y, const LinearSystemInstance& sys) {
  return sys.b_inner(x, y);
}

double b_norm(const Vector& x, const LinearSystemInstance& sys) {
  return sys.b_norm(x);
}

ProjectionResult project_affine(const Vector& x, const Matrix& a_sub,
                                const Vector& b_sub,
                                const LinearSystemInstance& sys) {
  if (a_sub.cols() != sys.cols() || x.size() != sys.cols() ||
      a_sub.rows() != b_sub.size()) {
    throw std::invalid_argument("project_affine: dimension mismatch");
  }
  const Matrix binv_at = sys.apply_b_inv(Matrix(a_sub.transpose()));
  const Matrix gram_sub = a_sub * binv_at;
  const SymmetricEig eig = SymmetricEig::compute(gram_sub);
  const Vector multipliers = eig.pinv_apply(a_sub * x - b_sub);

  ProjectionResult out;
  out.point = x - binv_at * multipliers;
  const double violation = (a_sub * out.point - b_sub).norm();
  if (violation > 1e-8 * (1.0 + b_sub.norm())) {
    throw std::invalid_argument(
        "project_affine: constraints are inconsistent (violation " +
        std::to_string(violation) + ")");
  }
  out.distance_b = sys.b_norm(x - out.point);
  return out;
}

}  // namespace skp
