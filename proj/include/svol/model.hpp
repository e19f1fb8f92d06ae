#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svol/error.hpp"

namespace svol {

/// The three model variants.
///
/// Classical: uncorrelated return and volatility errors (rho = 0, no mean term).
/// Correlated: corr(eps_t, eta_t) = rho, no mean term; conditional expected
///             returns are nonzero.
/// MeanCorrected: same as Correlated plus the deterministic mean term mu that
///             restores the martingale-difference property of returns. mu is
///             never a free parameter; it is a function of (alpha, phi, sigma,
///             rho) and is recomputed whenever the parameters change.
enum class ModelKind { Classical, Correlated, MeanCorrected };

const char* to_string(ModelKind k) noexcept;

/// Parses "svm0" / "svmrho" / "svmrhomu" (the CLI spellings). Throws ConfigError.
ModelKind model_kind_from_string(const std::string& s);

/// Parameter vector Theta = (alpha, phi, sigma, rho) plus the variant tag.
///
/// alpha: long-range level of the latent log-variance h_t
/// phi:   AR(1) persistence of h_t, |phi| < 1 strictly
/// sigma: volatility of the volatility process, > 0
/// rho:   corr(eps_t, eta_t) in (-1, 1); forced to 0 for Classical
struct ModelParams {
  double alpha = 0.0;
  double phi = 0.0;
  double sigma = 1.0;
  double rho = 0.0;
  ModelKind kind = ModelKind::Classical;
};

/// Checks all parameter invariants; returns the argument unchanged on success.
/// Throws Error with code StationarityViolation (|phi| >= 1), NonPositiveSigma,
/// CorrelationOutOfRange (|rho| >= 1) or KindConstraintViolation (Classical
/// with rho != 0). |phi| = 1 is rejected: every closed-form moment divides by
/// 1 - phi^2, so the boundary has no stationary distribution.
const ModelParams& validate(const ModelParams& p);

bool is_valid(const ModelParams& p) noexcept;

/// Stationary variance of the latent process, sigma^2 / (1 - phi^2).
double stationary_variance(const ModelParams& p) noexcept;

struct ConditionalNormal {
  double mean;
  double var;
};

/// Conditional law of r_t given (h_t, h_{t-1}):
///   N( mu + (rho e^{h_t/2}/sigma) (h_t - alpha - phi (h_{t-1}-alpha)),
///      e^{h_t} (1 - rho^2) )
/// with mu = 0 except for MeanCorrected, where mu comes from the closed-form
/// mean correction.
ConditionalNormal return_conditional(const ModelParams& p, double h_t, double h_prev);

/// Conditional law of h_t given h_{t-1}: N(alpha + phi (h_{t-1}-alpha), sigma^2).
ConditionalNormal volatility_conditional(const ModelParams& p, double h_prev) noexcept;

/// Aligned return series r_1..r_T and (optionally) the latent path h_1..h_T.
/// t0_state carries the h_0 used for initialization.
struct SeriesPair {
  std::vector<double> returns;
  std::optional<std::vector<double>> volatility;
  double t0_state = 0.0;
};

}  // namespace svol
