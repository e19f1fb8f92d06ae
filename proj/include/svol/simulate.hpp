#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "svol/model.hpp"
#include "svol/rng.hpp"

namespace svol {

enum class InitKind { Stationary, Fixed };

struct SimConfig {
  std::int64_t n_paths = 1;
  std::int64_t horizon = 1;  // T
  std::uint64_t seed = 0;
  InitKind init = InitKind::Stationary;
  double h0 = 0.0;  // used when init == Fixed
  int threads = 0;  // 0 = hardware concurrency
};

/// A Monte Carlo estimate with its standard error (sample sd / sqrt(n)).
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

struct CorrelatedPair {
  double epsilon;
  double eta;
};

/// Draws (eps, eta) standard bivariate normal with correlation rho:
/// eta ~ N(0,1), then eps = rho eta + sqrt(1-rho^2) z.
CorrelatedPair draw_correlated_pair(double rho, Rng& rng) noexcept;

/// Simulates one exact path of length config.horizon. The random stream is
/// derived from (config.seed, path_index), so multi-path runs are
/// reproducible path by path. Deterministic given (params, config, path_index).
SeriesPair simulate_path(const ModelParams& p, const SimConfig& config,
                         std::uint64_t path_index = 0);

/// Stationary moment estimates of r_t. Each draw is exact: h_prev from the
/// stationary law, one correlated (eps, eta) pair, one transition. The
/// variance/mu3/mu4 fields are central moments taken about the exact model
/// mean (0 for Classical and MeanCorrected, -mu for Correlated), so they
/// estimate the same quantities as the closed forms; the mean field is the
/// plain sample mean of r.
struct McMoments {
  McEstimate mean;
  McEstimate variance;
  McEstimate mu3;
  McEstimate mu4;
};

McMoments mc_moments(const ModelParams& p, std::int64_t n, std::uint64_t seed,
                     int threads = 0);

/// Covariance estimates cov(r_t, h_{t+j}) for j = -k_max..k_max, from n
/// independent stationary path segments of length 2 k_max + 1. Index i of the
/// result corresponds to j = i - k_max.
std::vector<McEstimate> mc_leadlag(const ModelParams& p, int k_max, std::int64_t n,
                                   std::uint64_t seed, int threads = 0);

/// Sample mean of returns over n_paths simulated paths of the given horizon
/// (n_paths * horizon values total). Returns are serially uncorrelated under
/// every variant, so sd/sqrt(n) is a valid standard error.
McEstimate mc_path_return_mean(const ModelParams& p, std::int64_t n_paths,
                               std::int64_t horizon, std::uint64_t seed,
                               int threads = 0);

}  // namespace svol
