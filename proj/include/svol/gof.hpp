#pragma once

#include <map>
#include <span>

#include "svol/inference.hpp"
#include "svol/moments.hpp"

namespace svol {

struct Descriptive {
  double mean;
  double variance;  // 1/n central moment
  double skewness;  // m3 / m2^{3/2}
  double kurtosis;  // m4 / m2^2, raw
};

/// Sample moments with 1/n normalization. Throws TooShort for n < 4 and
/// DegenerateSeries when the sample variance is zero (skew/kurt undefined).
Descriptive descriptive_stats(std::span<const double> returns);

/// Deviance of one (Theta, H) realization: -2 log f(r | Theta, H) with the
/// measurement density only (no latent transition terms) and the normalizing
/// constant g(r) taken as 1. Only deviance differences between models are
/// meaningful.
double deviance(const ModelParams& p, double h0, std::span<const double> h,
                std::span<const double> returns);

/// Average deviance over the retained draws of a chain.
double mean_deviance(const PosteriorChain& chain, std::span<const double> returns);

/// Mean squared one-step prediction error (1/T) sum (r_t - rhat)^2, where the
/// prediction rhat is constant per model: 0 for Classical and Correlated, the
/// posterior mean of the mean-correction term for MeanCorrected.
double mspe(const PosteriorChain& chain, std::span<const double> returns);

/// Sample correlations corr(r_t, h_{t+j}) for j = -k_max..k_max over the
/// overlapping windows of the two series.
std::map<int, double> empirical_leadlag(std::span<const double> returns,
                                        std::span<const double> h_path, int k_max);

struct GofReport {
  Descriptive descriptive;   // of the observed returns
  MomentSet model_moments;   // at the plug-in (posterior mean) Theta
  double model_return_mean;  // model-implied E[r_t]: 0, -mu, or 0 by variant
  double mean_deviance;
  double mspe;
  std::map<int, double> empirical_leadlag;
};

GofReport gof_report(const PosteriorChain& chain, std::span<const double> returns,
                     int k_max);

}  // namespace svol
