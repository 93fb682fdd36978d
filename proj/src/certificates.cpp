#include "skp/certificates.hpp"

#include <cmath>
#include <stdexcept>

namespace skp {

bool bound_is_squared(BoundKind kind) {
  return kind != BoundKind::kThm31Sequence && kind != BoundKind::kCor31Plateau;
}

namespace {

double checked_rho(double omega, double lambda_min_plus) {
  if (!(omega > 0.0 && omega < 2.0)) {
    throw std::invalid_argument("certificate: omega must lie in (0, 2)");
  }
  if (!(lambda_min_plus > 0.0 && lambda_min_plus <= 1.0 + 1e-10)) {
    throw std::invalid_argument(
        "certificate: lambda_min_plus must lie in (0, 1]");
  }
  const double rho = 1.0 - omega * (2.0 - omega) * lambda_min_plus;
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("certificate: rho outside (0, 1)");
  }
  return rho;
}

RateCertificate base_cert(BoundKind kind, double omega, double lambda_min_plus,
                          double initial_value) {
  if (initial_value < 0.0) {
    throw std::invalid_argument("certificate: negative initial value");
  }
  RateCertificate c;
  c.kind = kind;
  c.omega = omega;
  c.lambda_min_plus = lambda_min_plus;
  c.rho = checked_rho(omega, lambda_min_plus);
  c.initial_value = initial_value;
  return c;
}

}  // namespace

RateCertificate cert_thm31(double omega, double lambda_min_plus,
                           double initial_error_b) {
  return base_cert(BoundKind::kThm31Sequence, omega, lambda_min_plus,
                   initial_error_b);
}

RateCertificate cert_cor31(double omega, double lambda_min_plus, double sigma,
                           double initial_error_b) {
  if (sigma < 0.0) throw std::invalid_argument("cert_cor31: sigma >= 0 required");
  RateCertificate c = base_cert(BoundKind::kCor31Plateau, omega,
                                lambda_min_plus, initial_error_b);
  c.sigma = sigma;
  return c;
}

RateCertificate cert_thm32(double omega, double lambda_min_plus, double q,
                           double initial_error_b_sq) {
  RateCertificate c =
      base_cert(BoundKind::kThm32Q, omega, lambda_min_plus, initial_error_b_sq);
  if (!(q >= 0.0 && q < 1.0 - std::sqrt(c.rho))) {
    throw std::invalid_argument(
        "cert_thm32: q must satisfy 0 <= q < 1 - sqrt(rho)");
  }
  c.q = q;
  return c;
}

RateCertificate cert_thm33i(double omega, double lambda_min_plus,
                            double initial_error_b_sq) {
  return base_cert(BoundKind::kThm33iRandomSigma, omega, lambda_min_plus,
                   initial_error_b_sq);
}

RateCertificate cert_thm33ii(double omega, double lambda_min_plus, double q,
                             double initial_error_b_sq) {
  RateCertificate c = base_cert(BoundKind::kThm33iiQOrth, omega,
                                lambda_min_plus, initial_error_b_sq);
  if (!(q >= 0.0 && q < std::sqrt(c.rho))) {
    throw std::invalid_argument("cert_thm33ii: q must satisfy 0 <= q < sqrt(rho)");
  }
  c.q = q;
  return c;
}

RateCertificate cert_thm33iii(double omega, double lambda_min_plus, double q,
                              double initial_error_b_sq) {
  RateCertificate c = base_cert(BoundKind::kThm33iiiFValue, omega,
                                lambda_min_plus, initial_error_b_sq);
  if (!(q >= 0.0 && q < std::sqrt(omega * (2.0 - omega)))) {
    throw std::invalid_argument(
        "cert_thm33iii: q must satisfy 0 <= q < sqrt(omega(2-omega))");
  }
  c.q = q;
  return c;
}

RateCertificate cert_thm42(double omega, double lambda_min_plus, double theta,
                           Index r, double initial_error_b_sq) {
  if (omega != 1.0) {
    throw std::invalid_argument("cert_thm42: the structured rate assumes omega = 1");
  }
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw std::invalid_argument("cert_thm42: theta must lie in [0, 1)");
  }
  if (r < 1) throw std::invalid_argument("cert_thm42: r >= 1 required");
  RateCertificate c = base_cert(BoundKind::kThm42Structured, omega,
                                lambda_min_plus, initial_error_b_sq);
  c.theta = theta;
  c.r = r;
  return c;
}

RateCertificate cert_thm52(double omega, double lambda_min_plus, double q,
                           double initial_dual_gap) {
  RateCertificate c = base_cert(BoundKind::kThm52Dual, omega, lambda_min_plus,
                                initial_dual_gap);
  if (!(q >= 0.0 && q < 1.0 - std::sqrt(c.rho))) {
    throw std::invalid_argument(
        "cert_thm52: q must satisfy 0 <= q < 1 - sqrt(rho)");
  }
  c.q = q;
  return c;
}

std::vector<double> bound_sequence(const RateCertificate& cert, Index k_max,
                                   const std::vector<double>* sigma_seq) {
  if (k_max < 0) throw std::invalid_argument("bound_sequence: k_max >= 0");
  const bool needs_sigma = cert.kind == BoundKind::kThm31Sequence ||
                           cert.kind == BoundKind::kThm33iRandomSigma;
  if (needs_sigma) {
    if (sigma_seq == nullptr || Index(sigma_seq->size()) < k_max) {
      throw std::invalid_argument(
          "bound_sequence: sigma sequence of length >= k_max required");
    }
  }
  std::vector<double> bound(std::size_t(k_max) + 1);
  const double rho = cert.rho;
  const double e0 = cert.initial_value;
  switch (cert.kind) {
    case BoundKind::kThm31Sequence: {
      for (Index k = 0; k <= k_max; ++k) {
        double tail = 0.0;
        for (Index i = 0; i < k; ++i) {
          tail += std::pow(rho, double(k - 1 - i) / 2.0) * (*sigma_seq)[i];
        }
        bound[k] = std::pow(rho, double(k) / 2.0) * e0 + tail;
      }
      break;
    }
    case BoundKind::kCor31Plateau: {
      const double plateau = cert.sigma * std::sqrt(rho) / (1.0 - rho);
      for (Index k = 0; k <= k_max; ++k) {
        bound[k] = std::pow(rho, double(k) / 2.0) * e0 + plateau;
      }
      break;
    }
    case BoundKind::kThm32Q:
    case BoundKind::kThm52Dual: {
      const double factor = std::sqrt(rho) + cert.q;
      for (Index k = 0; k <= k_max; ++k) {
        bound[k] = std::pow(factor, 2.0 * double(k)) * e0;
      }
      break;
    }
    case BoundKind::kThm33iRandomSigma: {
      for (Index k = 0; k <= k_max; ++k) {
        double tail = 0.0;
        for (Index i = 0; i < k; ++i) {
          const double s = (*sigma_seq)[i];
          tail += std::pow(rho, double(k - 1 - i)) * s * s;
        }
        bound[k] = std::pow(rho, double(k)) * e0 + tail;
      }
      break;
    }
    case BoundKind::kThm33iiQOrth: {
      const double factor = rho + cert.q * cert.q;
      for (Index k = 0; k <= k_max; ++k) bound[k] = std::pow(factor, double(k)) * e0;
      break;
    }
    case BoundKind::kThm33iiiFValue: {
      const double factor = rho + cert.q * cert.q * cert.lambda_min_plus;
      for (Index k = 0; k <= k_max; ++k) bound[k] = std::pow(factor, double(k)) * e0;
      break;
    }
    case BoundKind::kThm42Structured: {
      const double factor =
          1.0 - (1.0 - std::pow(cert.theta, double(cert.r))) * cert.lambda_min_plus;
      for (Index k = 0; k <= k_max; ++k) bound[k] = std::pow(factor, double(k)) * e0;
      break;
    }
  }
  return bound;
}

ThetaEstimate theta_for_cg(std::vector<SketchSample>& population) {
  if (population.empty()) {
    throw std::invalid_argument("theta_for_cg: empty population");
  }
  double theta = 0.0;
  for (SketchSample& sample : population) {
    const SymmetricEig& eig = sample.factor();
    if (eig.rank() < sample.q()) {
      throw std::runtime_error(
          "theta_for_cg: singular M in the population; CG inapplicable");
    }
    const double kappa = eig.cond();
    const double root = std::sqrt(kappa);
    const double contraction = std::pow((root - 1.0) / (root + 1.0), 4.0);
    theta = std::max(theta, contraction);
  }
  ThetaEstimate out;
  out.theta = theta;
  out.population = population.size();
  return out;
}

ThetaEstimate theta_for_cg(const LinearSystemInstance& sys,
                           const SketchDistribution& dist,
                           std::uint64_t mc_samples, std::uint64_t seed,
                           std::uint64_t stream) {
  std::vector<SketchSample> population;
  bool exact = false;
  if (dist.finite_support() &&
      dist.support_size(sys.rows()).has_value()) {
    dist.for_each_support(sys.rows(),
                          [&](const std::vector<Index>& indices, double) {
                            population.push_back(make_block_sample(sys, indices));
                          });
    exact = true;
  } else {
    if (mc_samples == 0) {
      throw std::invalid_argument(
          "theta_for_cg: distribution support is not enumerable; pass a "
          "Monte-Carlo sample count");
    }
    RngStream rng(seed, stream);
    for (std::uint64_t i = 0; i < mc_samples; ++i) {
      population.push_back(draw_sketch(dist, sys, rng));
    }
  }
  ThetaEstimate out = theta_for_cg(population);
  out.exact = exact;
  return out;
}

ValidationReport validate_run(const std::vector<std::vector<double>>& trial_values,
                              const std::vector<double>& bound,
                              double confidence_slack) {
  ValidationReport report;
  if (trial_values.size() < 30) {
    throw std::invalid_argument("validate_run: at least 30 trials required");
  }
  const std::size_t horizon = bound.size();
  for (const auto& trial : trial_values) {
    if (trial.size() != horizon) {
      throw std::invalid_argument(
          "validate_run: trial horizons do not match the bound length");
    }
  }
  const double n = double(trial_values.size());
  report.empirical_mean.resize(horizon);
  report.standard_error.resize(horizon);
  report.bound = bound;
  report.pass = true;

  for (std::size_t k = 0; k < horizon; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& trial : trial_values) {
      sum += trial[k];
      sum_sq += trial[k] * trial[k];
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
    const double stderr_k = std::sqrt(var / n);
    report.empirical_mean[k] = mean;
    report.standard_error[k] = stderr_k;
    const double allowance = bound[k] * (1.0 + confidence_slack) + 3.0 * stderr_k;
    if (mean > allowance && report.pass) {
      report.pass = false;
      report.first_violation_k = Index(k);
      report.message = "mean " + std::to_string(mean) + " exceeds allowance " +
                       std::to_string(allowance) + " at k = " + std::to_string(k);
    }
  }
  if (report.pass) report.message = "all iterations within the bound";
  return report;
}

std::vector<std::vector<double>> native_errors(
    const std::vector<SolverTrace>& traces, const RateCertificate& cert) {
  std::vector<std::vector<double>> out;
  out.reserve(traces.size());
  const bool squared = bound_is_squared(cert.kind);
  for (const SolverTrace& trace : traces) {
    std::vector<double> values;
    values.reserve(trace.rel_errors.size());
    for (double rel : trace.rel_errors) {
      values.push_back(squared ? rel * cert.initial_value
                               : std::sqrt(std::max(0.0, rel)) * cert.initial_value);
    }
    out.push_back(std::move(values));
  }
  return out;
}

}  // namespace skp
