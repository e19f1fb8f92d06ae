#include "svol/moments.hpp"

#include <cmath>

namespace svol {

// All closed forms share powers of w = sigma^2 / (1 - phi^2). Exponents are
// assembled in log space and exponentiated once; the bracketed factors are
// O(1) sums of decaying exponentials, so nothing overflows before the final
// exp does (and then the value genuinely is that large).

double mean_correction(const ModelParams& p) noexcept {
  if (p.rho == 0.0) return 0.0;
  const double w = stationary_variance(p);
  return -(p.rho * p.sigma / 2.0) * std::exp(p.alpha / 2.0 + w / 8.0);
}

double variance(const ModelParams& p) noexcept {
  const double w = stationary_variance(p);
  const double rs = p.rho * p.rho * p.sigma * p.sigma;
  const double bracket = 1.0 + rs - rs / 4.0 * std::exp(-w / 4.0);
  return std::exp(p.alpha + w / 2.0) * bracket;
}

double third_moment(const ModelParams& p) noexcept {
  if (p.rho == 0.0) return 0.0;
  const double w = stationary_variance(p);
  const double rs = p.rho * p.rho * p.sigma * p.sigma;
  const double bracket = 3.0 + 2.25 * rs + rs / 6.0 * std::exp(-0.75 * w) -
                         (1.0 + rs) * std::exp(-0.5 * w);
  return 1.5 * p.rho * p.sigma * std::exp(1.5 * p.alpha + 1.125 * w) * bracket;
}

double fourth_moment(const ModelParams& p) noexcept {
  const double w = stationary_variance(p);
  const double rs = p.rho * p.rho * p.sigma * p.sigma;
  const double bracket = 1.5 * rs * (1.0 + rs) * std::exp(-1.25 * w) +
                         (3.0 + 24.0 * rs + 16.0 * rs * rs) -
                         3.0 / 16.0 * rs * rs * std::exp(-1.5 * w) -
                         9.0 * rs * (1.0 + 0.75 * rs) * std::exp(-0.75 * w);
  return std::exp(2.0 * p.alpha + 2.0 * w) * bracket;
}

MomentSet moment_set(const ModelParams& p) noexcept {
  MomentSet m{};
  m.mu = mean_correction(p);
  m.variance = variance(p);
  m.mu3 = third_moment(p);
  m.mu4 = fourth_moment(p);
  m.skewness = m.mu3 / std::pow(m.variance, 1.5);
  m.kurtosis = m.mu4 / (m.variance * m.variance);
  return m;
}

LeadLagProfile leadlag(const ModelParams& p, int k_max) {
  if (k_max < 1) throw Error(Errc::ConfigError, "k_max must be >= 1");
  const double w = stationary_variance(p);
  const double c = p.sigma * p.sigma / (4.0 * (1.0 - p.phi * p.phi));

  LeadLagProfile profile;
  profile.sigma_rh =
      p.rho * p.sigma * std::exp(p.alpha / 2.0 + w / 8.0) * (1.0 + c);
  const double denom = std::sqrt(variance(p) * w);
  profile.corr_rh = profile.sigma_rh / denom;

  profile.lead_cov.resize(k_max);
  profile.lag_cov.resize(k_max);
  profile.lead_corr.resize(k_max);
  profile.lag_corr.resize(k_max);
  double phi_k = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    phi_k *= p.phi;
    profile.lead_cov[k - 1] = phi_k * profile.sigma_rh;
    profile.lag_cov[k - 1] = profile.sigma_rh * phi_k * c / (1.0 + c);
    profile.lead_corr[k - 1] = profile.lead_cov[k - 1] / denom;
    profile.lag_corr[k - 1] = profile.lag_cov[k - 1] / denom;
  }
  return profile;
}

}  // namespace svol
