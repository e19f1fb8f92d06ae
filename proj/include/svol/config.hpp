#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "svol/inference.hpp"

namespace svol {

/// Flat `key = value` config file with `#` comments. Unknown keys are rejected
/// so typos do not silently fall back to defaults. Precedence is handled by
/// the CLI: defaults < config file < flags.
///
/// Recognized keys:
///   prior.alpha.mean, prior.alpha.var
///   prior.phi.beta.a, prior.phi.beta.b
///   prior.sigma_sq.shape, prior.sigma_sq.scale
///   chain.total_iters, chain.burn_in, chain.thin, chain.adapt_iters, chain.seed
struct FitConfig {
  Priors priors;
  ChainConfig chain;
};

FitConfig parse_fit_config(const std::filesystem::path& file, FitConfig base = {});

/// The effective configuration as a key -> value map (for manifests/summaries).
std::map<std::string, std::string> config_snapshot(const FitConfig& cfg);

}  // namespace svol
