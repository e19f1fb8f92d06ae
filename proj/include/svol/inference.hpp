#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "svol/model.hpp"

namespace svol {

/// Prior specification. rho always carries a flat Unif(-1,1) prior and is not
/// configurable; the remaining hyperparameters default to the standard
/// choices for this model family and can be overridden from a config file.
struct Priors {
  double alpha_mean = 0.0;
  double alpha_var = 25.0;
  // (phi+1)/2 ~ Beta(a, b)
  double phi_a = 20.0;
  double phi_b = 1.5;
  // sigma^2 ~ InverseGamma(shape, scale)
  double sigma_sq_shape = 2.5;
  double sigma_sq_scale = 0.025;
};

struct ChainConfig {
  std::int64_t total_iters = 180000;
  std::int64_t burn_in = 30000;
  std::int64_t thin = 50;
  std::uint64_t seed = 0;
  std::int64_t adapt_iters = -1;  // step-size adaptation window; -1 = burn_in

  std::int64_t retained() const noexcept { return (total_iters - burn_in) / thin; }
  std::int64_t adapt_window() const noexcept {
    return adapt_iters < 0 ? burn_in : adapt_iters;
  }
};

struct AcceptanceRates {
  double h = 0.0;  // pooled over latent sites
  double alpha = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  double rho = 0.0;  // 0 for Classical (block not sampled)
};

/// Thinned post-burn-in draws. h_draws[i] holds the latent path h_0..h_T
/// (T+1 values). mu is not stored: it is a deterministic function of each
/// retained Theta and is recomputed where needed.
struct PosteriorChain {
  ModelKind kind = ModelKind::Classical;
  std::vector<ModelParams> theta_draws;
  std::vector<std::vector<double>> h_draws;
  std::vector<double> deviance_draws;
  AcceptanceRates acceptance;  // measured over post-burn-in iterations
  ChainConfig config;
};

/// Joint log-density of the latent path and data:
/// log N(h_0; alpha, sigma^2/(1-phi^2))
///   + sum_t log N(h_t; alpha + phi(h_{t-1}-alpha), sigma^2)
///   + sum_t log N(r_t; return_conditional mean, return_conditional var).
/// h spans h_1..h_T and must match returns in length.
double log_likelihood(const ModelParams& p, double h0, std::span<const double> h,
                      std::span<const double> returns);

/// Convenience overload over a SeriesPair carrying its latent path.
double log_likelihood(const ModelParams& p, const SeriesPair& series);

/// Metropolis-within-Gibbs sampler. Blocks: each latent site h_0..h_T
/// (random-walk), alpha (random-walk), atanh(phi), log(sigma), atanh(rho)
/// (the last only for Correlated/MeanCorrected). Step sizes adapt toward 0.44
/// acceptance during the adaptation window and are frozen afterward. For
/// MeanCorrected the mean term is recomputed from Theta inside every
/// likelihood evaluation.
PosteriorChain sample_posterior(std::span<const double> returns, ModelKind kind,
                                const Priors& priors, const ChainConfig& config);

struct SummaryRow {
  std::string parameter;
  double mean;
  double sd;
};

/// Posterior mean and sd (n-1 denominator) per parameter over retained draws.
/// Rows: alpha, phi, sigma, and rho unless Classical. Throws EmptyChain.
std::vector<SummaryRow> posterior_summary(const PosteriorChain& chain);

/// Posterior mean of Theta with the chain's kind attached (plug-in estimate).
ModelParams posterior_mean_params(const PosteriorChain& chain);

/// Posterior mean latent path h_0..h_T over retained draws.
std::vector<double> posterior_mean_path(const PosteriorChain& chain);

/// Split-chain R-hat for one scalar across chains (diagnostic for multi-chain
/// runs; not part of the single-chain protocol).
double split_rhat(const std::vector<std::vector<double>>& per_chain_draws);

}  // namespace svol
