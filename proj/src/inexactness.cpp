#include "skp/inexactness.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace skp {

InexactnessModel InexactnessModel::none() { return {}; }

InexactnessModel InexactnessModel::abstract_fixed(double sigma) {
  if (sigma < 0) throw std::invalid_argument("abstract_fixed: sigma >= 0 required");
  InexactnessModel m;
  m.mode = ErrorMode::kAbstractFixed;
  m.sigma = sigma;
  return m;
}

InexactnessModel InexactnessModel::abstract_sequence(
    std::function<double(Index)> sigma_at) {
  InexactnessModel m;
  m.mode = ErrorMode::kAbstractSequence;
  m.sigma_at = std::move(sigma_at);
  return m;
}

InexactnessModel InexactnessModel::proportional_distance(double q) {
  if (q < 0) throw std::invalid_argument("proportional_distance: q >= 0 required");
  InexactnessModel m;
  m.mode = ErrorMode::kProportionalDistance;
  m.q = q;
  return m;
}

InexactnessModel InexactnessModel::proportional_fvalue(double q) {
  if (q < 0) throw std::invalid_argument("proportional_fvalue: q >= 0 required");
  InexactnessModel m;
  m.mode = ErrorMode::kProportionalFValue;
  m.q = q;
  return m;
}

InexactnessModel InexactnessModel::orthogonal_random(
    std::function<double(Index)> sigma_at) {
  InexactnessModel m;
  m.mode = ErrorMode::kOrthogonalRandom;
  m.sigma_at = std::move(sigma_at);
  return m;
}

InexactnessModel InexactnessModel::structured(InnerChoice inner) {
  InexactnessModel m;
  m.mode = ErrorMode::kStructured;
  m.inner = std::move(inner);
  return m;
}

Vector b_unit_direction(const LinearSystemInstance& sys, RngStream& rng) {
  const Index n = sys.cols();
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector g(n);
    for (Index i = 0; i < n; ++i) g(i) = rng.normal();
    Vector u = sys.apply_b_inv_sqrt(g);
    const double norm_b = sys.b_norm(u);
    if (norm_b > 1e-12) return u / norm_b;
  }
  throw std::runtime_error("b_unit_direction: degenerate draws");
}

Vector draw_abstract_error(const InexactnessModel& model, Index k,
                           const LinearSystemInstance& sys, SketchSample& sample,
                           const Vector& x, const Vector& x_star, double omega,
                           RngStream& rng, double* realized_norm) {
  if (realized_norm != nullptr) *realized_norm = 0.0;
  double target = 0.0;
  switch (model.mode) {
    case ErrorMode::kNone:
      return Vector::Zero(sys.cols());
    case ErrorMode::kAbstractFixed:
      target = model.sigma;
      break;
    case ErrorMode::kAbstractSequence:
    case ErrorMode::kOrthogonalRandom:
      if (!model.sigma_at) {
        throw std::invalid_argument("draw_abstract_error: sigma_at not set");
      }
      target = model.sigma_at(k);
      break;
    case ErrorMode::kProportionalDistance:
      target = model.q * sys.b_norm(x - x_star);
      break;
    case ErrorMode::kProportionalFValue:
      target = model.q * std::sqrt(2.0 * stochastic_f_value(sample, x));
      break;
    case ErrorMode::kStructured:
      throw std::logic_error(
          "draw_abstract_error: structured errors come from the inner solver");
  }
  if (target < 0) {
    throw std::invalid_argument("draw_abstract_error: negative error bound");
  }
  if (model.uniform_scale) target *= rng.uniform();
  if (realized_norm != nullptr) *realized_norm = target;
  if (target == 0.0) return Vector::Zero(sys.cols());

  Vector direction = b_unit_direction(sys, rng);
  if (model.mode == ErrorMode::kOrthogonalRandom) {
    const Vector contracted =
        (x - x_star) - omega * stochastic_gradient(sample, x);
    const double denom = sys.b_norm_squared(contracted);
    if (denom > 1e-24) {
      direction -=
          (sys.b_inner(contracted, direction) / denom) * contracted;
      const double norm_b = sys.b_norm(direction);
      if (norm_b <= 1e-12) {
        // Degenerate projection; resample once against a fresh direction.
        direction = b_unit_direction(sys, rng);
        direction -=
            (sys.b_inner(contracted, direction) / denom) * contracted;
      }
      direction /= sys.b_norm(direction);
    }
  }
  return target * direction;
}

}  // namespace skp
