#include "svol/gof.hpp"

#include <cmath>

#include "density.hpp"

namespace svol {

Descriptive descriptive_stats(std::span<const double> returns) {
  if (returns.size() < 4) {
    throw Error(Errc::TooShort, "need at least 4 observations");
  }
  const auto n = static_cast<double>(returns.size());
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double r : returns) {
    const double d = r - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  if (!(m2 > 0.0)) {
    throw Error(Errc::DegenerateSeries,
                "zero sample variance; skewness and kurtosis are undefined");
  }
  return {mean, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

double deviance(const ModelParams& p, double h0, std::span<const double> h,
                std::span<const double> returns) {
  validate(p);
  if (h.size() != returns.size()) {
    throw Error(Errc::LengthMismatch, "latent path and returns differ in length");
  }
  return -2.0 * detail::measurement_loglik(p, h0, h, returns);
}

double mean_deviance(const PosteriorChain& chain, std::span<const double> returns) {
  if (chain.theta_draws.empty()) throw Error(Errc::EmptyChain, "no retained draws");
  double sum = 0.0;
  for (std::size_t i = 0; i < chain.theta_draws.size(); ++i) {
    const auto& h = chain.h_draws[i];
    sum += deviance(chain.theta_draws[i], h[0], {h.data() + 1, h.size() - 1}, returns);
  }
  return sum / static_cast<double>(chain.theta_draws.size());
}

double mspe(const PosteriorChain& chain, std::span<const double> returns) {
  if (chain.theta_draws.empty()) throw Error(Errc::EmptyChain, "no retained draws");
  double rhat = 0.0;
  if (chain.kind == ModelKind::MeanCorrected) {
    for (const auto& d : chain.theta_draws) rhat += mean_correction(d);
    rhat /= static_cast<double>(chain.theta_draws.size());
  }
  double sum = 0.0;
  for (double r : returns) sum += (r - rhat) * (r - rhat);
  return sum / static_cast<double>(returns.size());
}

std::map<int, double> empirical_leadlag(std::span<const double> returns,
                                        std::span<const double> h_path, int k_max) {
  if (returns.size() != h_path.size()) {
    throw Error(Errc::LengthMismatch, "return and latent series differ in length");
  }
  if (k_max < 0 || static_cast<std::size_t>(k_max) >= returns.size()) {
    throw Error(Errc::ConfigError, "k_max must satisfy 0 <= k_max < series length");
  }

  const auto T = static_cast<std::ptrdiff_t>(returns.size());
  std::map<int, double> out;
  for (int j = -k_max; j <= k_max; ++j) {
    // Pearson correlation of (r_t, h_{t+j}) over the overlapping window.
    const std::ptrdiff_t lo = j >= 0 ? 0 : -j;
    const std::ptrdiff_t hi = j >= 0 ? T - j : T;
    const auto n = static_cast<double>(hi - lo);
    double mr = 0.0, mh = 0.0;
    for (std::ptrdiff_t t = lo; t < hi; ++t) {
      mr += returns[static_cast<std::size_t>(t)];
      mh += h_path[static_cast<std::size_t>(t + j)];
    }
    mr /= n;
    mh /= n;
    double srh = 0.0, srr = 0.0, shh = 0.0;
    for (std::ptrdiff_t t = lo; t < hi; ++t) {
      const double dr = returns[static_cast<std::size_t>(t)] - mr;
      const double dh = h_path[static_cast<std::size_t>(t + j)] - mh;
      srh += dr * dh;
      srr += dr * dr;
      shh += dh * dh;
    }
    out[j] = srh / std::sqrt(srr * shh);
  }
  return out;
}

GofReport gof_report(const PosteriorChain& chain, std::span<const double> returns,
                     int k_max) {
  GofReport rep;
  rep.descriptive = descriptive_stats(returns);

  const ModelParams plug_in = posterior_mean_params(chain);
  validate(plug_in);
  rep.model_moments = moment_set(plug_in);
  // Model-implied E[r_t]: the correlated variant without mean correction has
  // expected return -mu; the other two are exact martingale differences.
  rep.model_return_mean =
      chain.kind == ModelKind::Correlated ? -rep.model_moments.mu : 0.0;

  rep.mean_deviance = mean_deviance(chain, returns);
  rep.mspe = mspe(chain, returns);

  const std::vector<double> mean_path = posterior_mean_path(chain);
  rep.empirical_leadlag = empirical_leadlag(
      returns, {mean_path.data() + 1, mean_path.size() - 1}, k_max);
  return rep;
}

}  // namespace svol
