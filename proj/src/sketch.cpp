#include "skp/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace skp {

SketchDistribution SketchDistribution::block_uniform(Index block_size) {
  if (block_size < 1) {
    throw std::invalid_argument("block_uniform: block size must be >= 1");
  }
  SketchDistribution d;
  d.kind_ = Kind::kBlockUniform;
  d.block_size_ = block_size;
  return d;
}

SketchDistribution SketchDistribution::single_uniform() {
  SketchDistribution d;
  d.kind_ = Kind::kSingleUniform;
  d.block_size_ = 1;
  return d;
}

SketchDistribution SketchDistribution::gaussian() {
  SketchDistribution d;
  d.kind_ = Kind::kGaussian;
  d.block_size_ = 1;
  return d;
}

SketchDistribution SketchDistribution::gaussian(Matrix covariance) {
  SketchDistribution d;
  d.kind_ = Kind::kGaussian;
  d.block_size_ = 1;
  Eigen::LLT<Matrix> llt(covariance);
  if (!is_symmetric(covariance) || llt.info() != Eigen::Success) {
    throw std::invalid_argument("gaussian: covariance must be SPD");
  }
  d.covariance_ = std::move(covariance);
  d.covariance_chol_ = llt.matrixL();
  return d;
}

SketchDistribution SketchDistribution::fixed_blocks(
    std::vector<std::vector<Index>> blocks) {
  if (blocks.empty()) {
    throw std::invalid_argument("fixed_blocks: empty support");
  }
  SketchDistribution d;
  d.kind_ = Kind::kFixedBlocks;
  for (auto& block : blocks) {
    std::sort(block.begin(), block.end());
    block.erase(std::unique(block.begin(), block.end()), block.end());
    if (block.empty()) {
      throw std::invalid_argument("fixed_blocks: empty block");
    }
  }
  d.block_size_ = Index(blocks.front().size());
  d.blocks_ = std::move(blocks);
  return d;
}

void SketchDistribution::validate_for(Index m) const {
  switch (kind_) {
    case Kind::kBlockUniform:
      if (block_size_ > m) {
        throw std::invalid_argument(
            "sketch distribution: block size exceeds row count");
      }
      break;
    case Kind::kSingleUniform:
      if (m < 1) throw std::invalid_argument("sketch distribution: empty system");
      break;
    case Kind::kGaussian:
      if (covariance_.size() > 0 && covariance_.rows() != m) {
        throw std::invalid_argument(
            "sketch distribution: covariance size does not match row count");
      }
      break;
    case Kind::kFixedBlocks:
      for (const auto& block : blocks_) {
        for (Index i : block) {
          if (i < 0 || i >= m) {
            throw std::invalid_argument(
                "sketch distribution: block index out of range");
          }
        }
      }
      break;
  }
}

std::optional<std::uint64_t> SketchDistribution::support_size(
    Index m, std::uint64_t cap) const {
  switch (kind_) {
    case Kind::kSingleUniform:
      return std::uint64_t(m);
    case Kind::kFixedBlocks:
      return std::uint64_t(blocks_.size());
    case Kind::kBlockUniform: {
      // C(m, d), bailing out once past the cap.
      const std::uint64_t d = std::uint64_t(std::min<Index>(block_size_, m - block_size_));
      long double count = 1.0L;
      for (std::uint64_t i = 1; i <= d; ++i) {
        count = count * (long double)(std::uint64_t(m) - d + i) / (long double)i;
        if (count > (long double)cap * 2.0L) return std::nullopt;
      }
      const std::uint64_t rounded = (std::uint64_t)std::llroundl(count);
      if (rounded > cap) return std::nullopt;
      return rounded;
    }
    case Kind::kGaussian:
      return std::nullopt;
  }
  return std::nullopt;
}

void SketchDistribution::for_each_support(
    Index m, const std::function<void(const std::vector<Index>&, double)>& fn,
    std::uint64_t cap) const {
  validate_for(m);
  if (kind_ == Kind::kGaussian) {
    throw std::invalid_argument(
        "for_each_support: Gaussian sketches have continuous support");
  }
  const auto size = support_size(m, cap);
  if (!size.has_value()) {
    throw std::invalid_argument("for_each_support: support exceeds the cap");
  }
  switch (kind_) {
    case Kind::kSingleUniform: {
      const double p = 1.0 / double(m);
      std::vector<Index> idx(1);
      for (Index i = 0; i < m; ++i) {
        idx[0] = i;
        fn(idx, p);
      }
      break;
    }
    case Kind::kFixedBlocks: {
      const double p = 1.0 / double(blocks_.size());
      for (const auto& block : blocks_) fn(block, p);
      break;
    }
    case Kind::kBlockUniform: {
      const Index d = block_size_;
      const double p = 1.0 / double(*size);
      std::vector<Index> c(d);
      for (Index i = 0; i < d; ++i) c[i] = i;
      while (true) {
        fn(c, p);
        Index i = d - 1;
        while (i >= 0 && c[i] == m - d + i) --i;
        if (i < 0) break;
        ++c[i];
        for (Index j = i + 1; j < d; ++j) c[j] = c[j - 1] + 1;
      }
      break;
    }
    case Kind::kGaussian:
      break;  // unreachable
  }
}

namespace {

std::vector<Index> sample_subset(Index m, Index d, RngStream& rng) {
  // Floyd's algorithm: uniform d-subset of {0..m-1}.
  std::vector<Index> out;
  out.reserve(d);
  for (Index j = m - d; j < m; ++j) {
    const Index t = Index(rng.next_below(std::uint64_t(j) + 1));
    if (std::find(out.begin(), out.end(), t) != out.end()) {
      out.push_back(j);
    } else {
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void SketchSample::init_block(const LinearSystemInstance& sys,
                              std::vector<Index> indices) {
  const Index q_new = Index(indices.size());
  sk_rows_.resize(q_new, sys.cols());
  sk_rhs_.resize(q_new);
  for (Index i = 0; i < q_new; ++i) {
    sk_rows_.row(i) = sys.a().row(indices[i]);
    sk_rhs_(i) = sys.rhs()(indices[i]);
  }
  if (sys.has_gram()) {
    const Matrix& gram = sys.gram();
    m_.resize(q_new, q_new);
    for (Index i = 0; i < q_new; ++i) {
      for (Index j = 0; j < q_new; ++j) m_(i, j) = gram(indices[i], indices[j]);
    }
  }
  indices_ = std::move(indices);
}

void SketchSample::init_gaussian(const LinearSystemInstance& sys,
                                 const SketchDistribution& dist, Vector z) {
  gauss_vec_ = dist.covariance_chol().size() > 0
                   ? Vector(dist.covariance_chol() * z)
                   : std::move(z);
  sk_rows_ = gauss_vec_.transpose() * sys.a();
  sk_rhs_.resize(1);
  sk_rhs_(0) = gauss_vec_.dot(sys.rhs());
  const Vector row = sk_rows_.row(0).transpose();
  m_.resize(1, 1);
  m_(0, 0) = row.dot(sys.apply_b_inv(row));
}

std::vector<Index> draw_index_set(const SketchDistribution& dist, Index m,
                                  RngStream& rng) {
  dist.validate_for(m);
  switch (dist.kind()) {
    case SketchDistribution::Kind::kSingleUniform:
      return {Index(rng.next_below(std::uint64_t(m)))};
    case SketchDistribution::Kind::kBlockUniform:
      return sample_subset(m, dist.block_size(), rng);
    case SketchDistribution::Kind::kFixedBlocks:
      return dist.blocks()[rng.next_below(std::uint64_t(dist.blocks().size()))];
    case SketchDistribution::Kind::kGaussian:
      throw std::invalid_argument(
          "draw_index_set: Gaussian sketches have no index-set form");
  }
  throw std::logic_error("draw_index_set: unreachable");
}

SketchSample make_block_sample(const LinearSystemInstance& sys,
                               std::vector<Index> indices) {
  if (indices.empty()) {
    throw std::invalid_argument("make_block_sample: empty index set");
  }
  for (Index i : indices) {
    if (i < 0 || i >= sys.rows()) {
      throw std::invalid_argument("make_block_sample: index out of range");
    }
  }
  SketchSample s;
  s.sys_ = &sys;
  s.init_block(sys, std::move(indices));
  return s;
}

SketchSample draw_sketch(const SketchDistribution& dist,
                         const LinearSystemInstance& sys, RngStream& rng) {
  dist.validate_for(sys.rows());
  SketchSample s;
  s.sys_ = &sys;
  const Index m = sys.rows();
  switch (dist.kind()) {
    case SketchDistribution::Kind::kSingleUniform:
      s.init_block(sys, {Index(rng.next_below(std::uint64_t(m)))});
      break;
    case SketchDistribution::Kind::kBlockUniform:
      s.init_block(sys, sample_subset(m, dist.block_size(), rng));
      break;
    case SketchDistribution::Kind::kFixedBlocks: {
      const auto& blocks = dist.blocks();
      s.init_block(sys, blocks[rng.next_below(std::uint64_t(blocks.size()))]);
      break;
    }
    case SketchDistribution::Kind::kGaussian: {
      Vector z(m);
      for (Index i = 0; i < m; ++i) z(i) = rng.normal();
      s.init_gaussian(sys, dist, std::move(z));
      break;
    }
  }
  return s;
}

Vector SketchSample::sketched_residual(const Vector& x) const {
  if (x.size() != sys_->cols()) {
    throw std::invalid_argument("sketched_residual: dimension mismatch");
  }
  return sk_rhs_ - sk_rows_ * x;
}

const Matrix& SketchSample::dense_m() {
  if (m_.size() == 0) {
    const Matrix binv_rows_t = sys_->apply_b_inv(Matrix(sk_rows_.transpose()));
    m_ = sk_rows_ * binv_rows_t;
  }
  return m_;
}

Vector SketchSample::m_apply(const Vector& v) const {
  if (m_.size() > 0) return m_ * v;
  return sk_rows_ * sys_->apply_b_inv(Vector(sk_rows_.transpose() * v));
}

const SymmetricEig& SketchSample::factor() {
  if (!factor_.has_value()) {
    factor_ = SymmetricEig::compute(dense_m());
  }
  return *factor_;
}

Vector SketchSample::least_norm(const Vector& d) {
  if (d.size() != q()) {
    throw std::invalid_argument("least_norm: dimension mismatch");
  }
  const Matrix& m = dense_m();
  if (!llt_attempted_) {
    llt_attempted_ = true;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() == Eigen::Success) llt_ = std::move(llt);
  }
  if (llt_.has_value()) {
    Vector lambda = llt_->solve(d);
    if ((m * lambda - d).norm() <= 1e-10 * (1.0 + d.norm())) return lambda;
  }
  return factor().pinv_apply(d);
}

Vector SketchSample::z_apply(const Vector& v) {
  return sk_rows_.transpose() * least_norm(Vector(sk_rows_ * v));
}

Vector SketchSample::primal_lift(const Vector& lambda) const {
  if (lambda.size() != q()) {
    throw std::invalid_argument("primal_lift: dimension mismatch");
  }
  if (sys_->b_is_a()) {
    // B = A collapses B^{-1} A^T S to S itself.
    Vector out = Vector::Zero(sys_->cols());
    if (!indices_.empty()) {
      for (Index i = 0; i < q(); ++i) out(indices_[i]) = lambda(i);
    } else {
      out = gauss_vec_ * lambda(0);
    }
    return out;
  }
  return sys_->apply_b_inv(Vector(sk_rows_.transpose() * lambda));
}

Vector SketchSample::lift_s(const Vector& lambda) const {
  if (lambda.size() != q()) {
    throw std::invalid_argument("lift_s: dimension mismatch");
  }
  Vector out = Vector::Zero(sys_->rows());
  if (!indices_.empty()) {
    for (Index i = 0; i < q(); ++i) out(indices_[i]) = lambda(i);
  } else {
    out = gauss_vec_ * lambda(0);
  }
  return out;
}

double stochastic_f_value(SketchSample& sample, const Vector& x) {
  const Vector d = sample.sketched_residual(x);
  return std::max(0.0, 0.5 * d.dot(sample.least_norm(d)));
}

Vector stochastic_gradient(SketchSample& sample, const Vector& x) {
  const Vector d = sample.sketched_residual(x);
  return -sample.primal_lift(sample.least_norm(d));
}

double inner_dual_value(SketchSample& sample, const Vector& d,
                        const Vector& lambda) {
  return d.dot(lambda) - 0.5 * lambda.dot(sample.m_apply(lambda));
}

}  // namespace skp
