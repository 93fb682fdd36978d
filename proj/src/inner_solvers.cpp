#include "skp/inner_solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace skp {

InnerSolveReport solve_exact_least_norm(SketchSample& sample, const Vector& d) {
  InnerSolveReport report;
  report.method = InnerMethod::kExact;
  report.lambda = sample.least_norm(d);
  report.residual_norm = (sample.m_apply(report.lambda) - d).norm();
  if (report.residual_norm > 1e-8 * (1.0 + d.norm())) {
    throw std::runtime_error(
        "solve_exact_least_norm: right-hand side lies outside range(M); the "
        "sketched system is inconsistent");
  }
  return report;
}

InnerSolveReport solve_cg(SketchSample& sample, const Vector& d, Index r,
                          const CgOptions& opts) {
  if (r < 1) throw std::invalid_argument("solve_cg: r must be >= 1");
  if (d.size() != sample.q()) {
    throw std::invalid_argument("solve_cg: dimension mismatch");
  }
  InnerSolveReport report;
  report.method = InnerMethod::kCg;
  report.r = r;

  Vector lambda = Vector::Zero(sample.q());
  Vector residual = d;
  Vector direction = residual;
  double res_sq = residual.squaredNorm();

  Index it = 0;
  while (it < r && res_sq > 0.0) {
    const Vector m_dir = sample.m_apply(direction);
    const double curvature = direction.dot(m_dir);
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
      throw std::runtime_error(
          "solve_cg: M is numerically singular or indefinite; use the nested "
          "sketch-and-project inner solver instead");
    }
    const double alpha = res_sq / curvature;
    lambda += alpha * direction;
    residual -= alpha * m_dir;
    const double res_sq_next = residual.squaredNorm();
    ++it;
    if (opts.early_exit && std::sqrt(res_sq_next) <= opts.early_exit_tol) {
      res_sq = res_sq_next;
      break;
    }
    direction = residual + (res_sq_next / res_sq) * direction;
    res_sq = res_sq_next;
  }

  report.lambda = std::move(lambda);
  report.iterations_used = it;
  report.residual_norm = std::sqrt(res_sq);
  return report;
}

InnerSolveReport solve_nested_sp(SketchSample& sample, const Vector& d, Index r,
                                 const SketchDistribution& inner_dist,
                                 RngStream& rng) {
  if (r < 1) throw std::invalid_argument("solve_nested_sp: r must be >= 1");
  if (d.size() != sample.q()) {
    throw std::invalid_argument("solve_nested_sp: dimension mismatch");
  }
  const Matrix& m = sample.dense_m();
  const Index q = sample.q();

  InnerSolveReport report;
  report.method = InnerMethod::kNestedSp;
  report.r = r;

  Vector lambda = Vector::Zero(q);  // lambda^0 = 0: the least-norm anchor
  for (Index it = 0; it < r; ++it) {
    const std::vector<Index> rows = draw_index_set(inner_dist, q, rng);
    if (rows.size() == 1) {
      // Kaczmarz row step on the symmetric system.
      const Index i = rows[0];
      const double row_sq = m.row(i).squaredNorm();
      if (row_sq <= 0.0) continue;
      const double residual_i = d(i) - m.row(i).dot(lambda);
      lambda += (residual_i / row_sq) * m.row(i).transpose();
    } else {
      const Index kq = Index(rows.size());
      Matrix rows_m(kq, q);
      Vector rhs(kq);
      for (Index i = 0; i < kq; ++i) {
        rows_m.row(i) = m.row(rows[i]);
        rhs(i) = d(rows[i]);
      }
      const Matrix gram = rows_m * rows_m.transpose();
      const Vector mult =
          SymmetricEig::compute(gram).pinv_apply(rhs - rows_m * lambda);
      lambda += rows_m.transpose() * mult;
    }
  }

  report.lambda = std::move(lambda);
  report.iterations_used = r;
  report.residual_norm = (m * report.lambda - d).norm();
  return report;
}

InnerSolveReport solve_inner(SketchSample& sample, const Vector& d,
                             const InnerChoice& choice, RngStream& rng) {
  switch (choice.method) {
    case InnerMethod::kExact:
      return solve_exact_least_norm(sample, d);
    case InnerMethod::kCg:
      return solve_cg(sample, d, choice.r);
    case InnerMethod::kNestedSp:
      return solve_nested_sp(sample, d, choice.r, choice.inner_dist, rng);
  }
  throw std::logic_error("solve_inner: unreachable");
}

}  // namespace skp
