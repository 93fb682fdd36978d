#pragma once

#include <functional>

#include "skp/inner_solvers.hpp"

namespace skp {

/// Which mechanism produces the per-step error added to the exact update.
enum class ErrorMode {
  kNone,
  kAbstractFixed,          // |eps|_B = sigma each step
  kAbstractSequence,       // |eps|_B = sigma_at(k)
  kProportionalDistance,   // |eps|_B = q |x_k - x*|_B
  kProportionalFValue,     // |eps|_B = q sqrt(2 f_S(x_k))
  kOrthogonalRandom,       // |eps|_B = sigma_at(k), eps B-orthogonal to the
                           // contracted residual direction
  kStructured,             // eps implied by an inexact inner solve
};

struct InexactnessModel {
  ErrorMode mode = ErrorMode::kNone;
  double sigma = 0.0;
  double q = 0.0;
  std::function<double(Index)> sigma_at;  // sequence modes
  /// When set, the realized norm is uniform on [0, sigma_k] instead of
  /// sitting on the bound with equality.
  bool uniform_scale = false;
  InnerChoice inner;  // structured mode

  static InexactnessModel none();
  static InexactnessModel abstract_fixed(double sigma);
  static InexactnessModel abstract_sequence(std::function<double(Index)> sigma_at);
  static InexactnessModel proportional_distance(double q);
  static InexactnessModel proportional_fvalue(double q);
  static InexactnessModel orthogonal_random(std::function<double(Index)> sigma_at);
  static InexactnessModel structured(InnerChoice inner);

  bool is_structured() const { return mode == ErrorMode::kStructured; }
};

/// A random direction with unit B-norm: standard normal pushed through
/// B^{-1/2}, then normalized in the B-norm.
Vector b_unit_direction(const LinearSystemInstance& sys, RngStream& rng);

/// Draws the abstract error for one step. `x_star` may be empty for modes
/// that do not reference it. The orthogonal mode projects a random direction
/// onto the B-orthogonal complement of
///   (I - omega B^{-1} Z_k)(x_k - x*) = (x_k - x*) - omega grad f_S(x_k).
/// Throws for the structured mode (that error is produced by the inner
/// solver, not drawn).
Vector draw_abstract_error(const InexactnessModel& model, Index k,
                           const LinearSystemInstance& sys, SketchSample& sample,
                           const Vector& x, const Vector& x_star, double omega,
                           RngStream& rng, double* realized_norm = nullptr);

}  // namespace skp
