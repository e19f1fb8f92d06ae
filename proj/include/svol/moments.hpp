#pragma once

#include <vector>

#include "svol/model.hpp"

namespace svol {

/// Closed-form stationary moments of the return process for a given Theta.
/// skewness = mu3 / variance^{3/2}, kurtosis = mu4 / variance^2 (raw, not excess).
struct MomentSet {
  double mu;        // mean correction term; E[r_t] of the correlated model is -mu
  double variance;  // V(r_t)
  double mu3;       // third central moment
  double mu4;       // fourth central moment
  double skewness;
  double kurtosis;
};

/// Covariance and correlation profile between r_t and h_{t +- k}.
/// lead_cov[k-1] = cov(r_t, h_{t+k}) = phi^k sigma_rh for k = 1..k_max.
/// lag_cov[k-1]  = cov(r_t, h_{t-k}) = sigma_rh phi^k c/(1+c), c = sigma^2/(4(1-phi^2)).
/// Correlations divide by sqrt(V(r_t) var(h_t)), var(h_t) = sigma^2/(1-phi^2).
struct LeadLagProfile {
  double sigma_rh = 0.0;  // contemporaneous cov(r_t, h_t)
  double corr_rh = 0.0;   // contemporaneous correlation
  std::vector<double> lead_cov;
  std::vector<double> lag_cov;
  std::vector<double> lead_corr;
  std::vector<double> lag_corr;
};

/// Mean correction: mu = -(rho sigma / 2) exp{alpha/2 + sigma^2 / (8(1-phi^2))}.
/// Zero iff rho = 0.
double mean_correction(const ModelParams& p) noexcept;

/// Stationary return variance:
///   exp{alpha + sigma^2/(2(1-phi^2))}
///     * (1 + rho^2 sigma^2 - (rho^2 sigma^2 / 4) exp{-sigma^2/(4(1-phi^2))}).
double variance(const ModelParams& p) noexcept;

/// Third central moment; zero iff rho = 0, sign follows rho in the tested regimes.
double third_moment(const ModelParams& p) noexcept;

/// Fourth central moment; always positive. For rho = 0 this reduces to
/// 3 exp{2 alpha + 2 sigma^2/(1-phi^2)}.
double fourth_moment(const ModelParams& p) noexcept;

/// All of the above plus skewness and kurtosis, mutually consistent.
MomentSet moment_set(const ModelParams& p) noexcept;

/// Lead-lag covariances and correlations for k = 1..k_max. Requires k_max >= 1.
LeadLagProfile leadlag(const ModelParams& p, int k_max);

}  // namespace svol
