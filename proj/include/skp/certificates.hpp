#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skp/solver.hpp"

namespace skp {

/// Which closed-form upper bound a certificate encodes. The "native quantity"
/// is what the bound constrains: the expected B-norm error for the sequence
/// and plateau kinds, the expected squared B-norm error for the q/theta
/// kinds, and the dual suboptimality for the dual kind.
enum class BoundKind {
  kThm31Sequence,   // rho^{k/2} e0 + sum_i rho^{(k-1-i)/2} sigma_i
  kCor31Plateau,    // rho^{k/2} e0 + sigma sqrt(rho)/(1-rho)
  kThm32Q,          // (sqrt(rho)+q)^{2k} e0^2
  kThm33iRandomSigma,  // rho^k e0^2 + sum_i rho^{k-1-i} sigma_i^2
  kThm33iiQOrth,    // (rho + q^2)^k e0^2
  kThm33iiiFValue,  // (rho + q^2 lambda_min_plus)^k e0^2
  kThm42Structured, // [1 - (1 - theta^r) lambda_min_plus]^k e0^2
  kThm52Dual,       // (sqrt(rho)+q)^{2k} [D(y*) - D(y0)]
};

bool bound_is_squared(BoundKind kind);

struct RateCertificate {
  BoundKind kind;
  double omega = 1.0;
  double lambda_min_plus = 0.0;
  double rho = 0.0;  // 1 - omega(2-omega) lambda_min_plus
  double q = 0.0;
  double sigma = 0.0;  // plateau kind
  double theta = 0.0;  // structured kind
  Index r = 0;         // structured kind
  /// Initial value in the bound's native quantity.
  double initial_value = 0.0;
};

/// Factories validate the admissible parameter ranges from the theory:
/// omega in (0,2), lambda_min_plus in (0,1]; thm32/thm52 need q < 1-sqrt(rho);
/// thm33ii needs q < sqrt(rho); thm33iii needs q < sqrt(omega(2-omega));
/// thm42 needs theta in [0,1), r >= 1 and unit stepsize.
RateCertificate cert_thm31(double omega, double lambda_min_plus,
                           double initial_error_b);
RateCertificate cert_cor31(double omega, double lambda_min_plus, double sigma,
                           double initial_error_b);
RateCertificate cert_thm32(double omega, double lambda_min_plus, double q,
                           double initial_error_b_sq);
RateCertificate cert_thm33i(double omega, double lambda_min_plus,
                            double initial_error_b_sq);
RateCertificate cert_thm33ii(double omega, double lambda_min_plus, double q,
                             double initial_error_b_sq);
RateCertificate cert_thm33iii(double omega, double lambda_min_plus, double q,
                              double initial_error_b_sq);
RateCertificate cert_thm42(double omega, double lambda_min_plus, double theta,
                           Index r, double initial_error_b_sq);
RateCertificate cert_thm52(double omega, double lambda_min_plus, double q,
                           double initial_dual_gap);

/// The bound value at k = 0..k_max. sigma_seq (entries sigma_i, i = 0..k_max-1)
/// is required for the sequence kinds and must be at least k_max long.
std::vector<double> bound_sequence(const RateCertificate& cert, Index k_max,
                                   const std::vector<double>* sigma_seq = nullptr);

struct ThetaEstimate {
  double theta = 0.0;
  std::uint64_t population = 0;
  bool exact = false;  // true when the support was enumerated
};

/// theta_CG = max over the sketch population of
/// ((sqrt(kappa(M)) - 1)/(sqrt(kappa(M)) + 1))^4, the per-CG-iteration
/// contraction of the squared M-norm error. Throws on singular M.
ThetaEstimate theta_for_cg(std::vector<SketchSample>& population);
/// Enumerates the distribution's support when finite (exact), otherwise draws
/// mc_samples sketches.
ThetaEstimate theta_for_cg(const LinearSystemInstance& sys,
                           const SketchDistribution& dist,
                           std::uint64_t mc_samples = 0, std::uint64_t seed = 0,
                           std::uint64_t stream = 0);

struct ValidationReport {
  bool pass = false;
  Index first_violation_k = -1;
  std::vector<double> empirical_mean;
  std::vector<double> standard_error;
  std::vector<double> bound;
  std::string message;
};

/// Monte-Carlo check of a bound: PASS iff for every k
///   mean_k <= bound_k * (1 + confidence_slack) + 3 * stderr_k.
/// trial_values[t][k] must hold the native quantity; >= 30 equal-horizon
/// trials are required.
ValidationReport validate_run(const std::vector<std::vector<double>>& trial_values,
                              const std::vector<double>& bound,
                              double confidence_slack = 0.05);

/// Per-trial native-quantity curves for a certificate, from solver traces
/// (squares or roots the recorded relative errors as the bound requires).
std::vector<std::vector<double>> native_errors(
    const std::vector<SolverTrace>& traces, const RateCertificate& cert);

}  // namespace skp
