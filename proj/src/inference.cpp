#include "svol/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "density.hpp"
#include "svol/rng.hpp"

namespace svol {

namespace {

void check_priors(const Priors& pr) {
  if (!(pr.alpha_var > 0.0) || !(pr.phi_a > 0.0) || !(pr.phi_b > 0.0) ||
      !(pr.sigma_sq_shape > 0.0) || !(pr.sigma_sq_scale > 0.0)) {
    throw Error(Errc::PriorSupportViolation,
                "prior hyperparameters must be positive");
  }
}

void check_config(const ChainConfig& cfg) {
  if (cfg.thin < 1 || cfg.burn_in < 0 || cfg.burn_in >= cfg.total_iters) {
    throw Error(Errc::ConfigError,
                "need 0 <= burn_in < total_iters and thin >= 1");
  }
  if (cfg.adapt_window() > cfg.burn_in) {
    throw Error(Errc::ConfigError, "adapt_iters must not exceed burn_in");
  }
}

// Log prior density of Theta up to constants that cancel in Metropolis ratios.
double log_prior(const ModelParams& p, const Priors& pr) {
  const double da = p.alpha - pr.alpha_mean;
  double lp = -0.5 * da * da / pr.alpha_var;
  lp += (pr.phi_a - 1.0) * std::log1p(p.phi) + (pr.phi_b - 1.0) * std::log1p(-p.phi);
  const double s2 = p.sigma * p.sigma;
  lp += -(pr.sigma_sq_shape + 1.0) * std::log(s2) - pr.sigma_sq_scale / s2;
  // rho ~ Unif(-1,1): constant on the support.
  return lp;
}

struct StepSize {
  double log_s = 0.0;
  std::int64_t proposed = 0;  // post-adaptation proposals
  std::int64_t accepted = 0;

  double value() const noexcept { return std::exp(log_s); }
  void adapt(double accept_prob, std::int64_t iter) noexcept {
    // Floored gain: the target keeps drifting while the chain approaches
    // equilibrium, so the schedule must stay responsive through the whole
    // window. Steps freeze once the window ends.
    const double gamma = std::max(0.05, std::pow(static_cast<double>(iter), -0.6));
    log_s += gamma * (accept_prob - 0.44);
    log_s = std::clamp(log_s, -8.0, 4.0);
  }
  double rate() const noexcept {
    return proposed == 0 ? 0.0
                         : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

// Local posterior terms touching h_t only; ht has T+1 entries, r has T.
double site_target(const ModelParams& p, double mu, const std::vector<double>& ht,
                   std::span<const double> r, std::size_t t, double value) {
  const std::size_t T = r.size();
  double lp = 0.0;
  if (t == 0) {
    lp += detail::log_stationary(p, value);
    lp += detail::log_trans(p, value, ht[1]);
    lp += detail::log_meas(p, mu, value, ht[1], r[0]);
  } else {
    lp += detail::log_trans(p, ht[t - 1], value);
    lp += detail::log_meas(p, mu, ht[t - 1], value, r[t - 1]);
    if (t < T) {
      lp += detail::log_trans(p, value, ht[t + 1]);
      lp += detail::log_meas(p, mu, value, ht[t + 1], r[t]);
    }
  }
  return lp;
}

bool metropolis_accept(double log_ratio, Rng& rng, double& accept_prob) {
  if (std::isnan(log_ratio)) {
    accept_prob = 0.0;
    rng.uniform_pos();  // keep the stream aligned with the accept draw
    return false;
  }
  accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  return std::log(rng.uniform_pos()) < log_ratio;
}

}  // namespace

double log_likelihood(const ModelParams& p, double h0, std::span<const double> h,
                      std::span<const double> returns) {
  validate(p);
  if (h.size() != returns.size()) {
    throw Error(Errc::LengthMismatch, "latent path and returns differ in length");
  }
  if (returns.empty()) throw Error(Errc::EmptyInput, "empty series");

  const double mu = detail::mean_term(p);
  double ll = detail::log_stationary(p, h0);
  double h_prev = h0;
  for (std::size_t t = 0; t < h.size(); ++t) {
    ll += detail::log_trans(p, h_prev, h[t]);
    ll += detail::log_meas(p, mu, h_prev, h[t], returns[t]);
    h_prev = h[t];
  }
  return ll;
}

double log_likelihood(const ModelParams& p, const SeriesPair& series) {
  if (!series.volatility) {
    throw Error(Errc::LengthMismatch, "series carries no latent path");
  }
  return log_likelihood(p, series.t0_state, *series.volatility, series.returns);
}

PosteriorChain sample_posterior(std::span<const double> returns, ModelKind kind,
                                const Priors& priors, const ChainConfig& config) {
  check_priors(priors);
  check_config(config);
  if (returns.size() < 10) {
    throw Error(Errc::TooShort, "need at least 10 returns to fit");
  }
  for (double r : returns) {
    if (!std::isfinite(r)) {
      throw Error(Errc::NonFiniteLikelihood, "returns contain non-finite values");
    }
  }

  const std::size_t T = returns.size();
  const bool sample_rho = kind != ModelKind::Classical;

  // Starting point: latent path and alpha at the log sample variance of the
  // data, remaining parameters at prior-typical values.
  double mean_r = 0.0;
  for (double r : returns) mean_r += r;
  mean_r /= static_cast<double>(T);
  double var_r = 0.0;
  for (double r : returns) var_r += (r - mean_r) * (r - mean_r);
  var_r /= static_cast<double>(T);
  if (!(var_r > 0.0)) {
    throw Error(Errc::DegenerateSeries, "returns have zero sample variance");
  }
  const double log_var = std::log(var_r);

  ModelParams p;
  p.kind = kind;
  p.alpha = log_var;
  // phi starts at the prior mode (persistence near one is the regime the
  // Beta(20, 1.5) prior encodes); sigma at the prior mean.
  p.phi = priors.phi_a > 1.0 && priors.phi_a + priors.phi_b > 2.0
              ? 2.0 * (priors.phi_a - 1.0) / (priors.phi_a + priors.phi_b - 2.0) - 1.0
              : 0.0;
  p.sigma = std::sqrt(priors.sigma_sq_scale / (priors.sigma_sq_shape - 1.0 > 0.0
                                                   ? priors.sigma_sq_shape - 1.0
                                                   : priors.sigma_sq_shape));
  p.rho = 0.0;
  validate(p);

  std::vector<double> ht(T + 1, log_var);

  Rng rng(config.seed, 0);
  // Latent-site and alpha proposals are scaled by the conditional sd implied
  // by the current (phi, sigma), so the adapted multipliers stay calibrated
  // after freezing even though those parameters keep moving. The scale does
  // not depend on the coordinate being updated, so proposals stay symmetric.
  const double sqrt_T = std::sqrt(static_cast<double>(T));
  std::vector<StepSize> step_h(T + 1);
  for (auto& s : step_h) s.log_s = 0.0;
  StepSize step_alpha{std::log(2.4), 0, 0};
  StepSize step_phi{std::log(2.4), 0, 0};
  StepSize step_sigma{std::log(0.1), 0, 0};
  StepSize step_sigma_nc{std::log(0.1), 0, 0};
  StepSize step_phi_nc{std::log(0.1), 0, 0};
  StepSize step_rho{std::log(0.2), 0, 0};
  const auto h_scale = [&] { return p.sigma / std::sqrt(1.0 + p.phi * p.phi); };
  const auto alpha_scale = [&] {
    return p.sigma / (std::max(1e-3, 1.0 - p.phi) * sqrt_T);
  };
  // Proposal sd for atanh(phi); depends on the coordinate itself, so the phi
  // block carries a Hastings correction for the asymmetric kernel.
  const auto phi_scale = [&](double phi) {
    return 1.0 / std::sqrt(static_cast<double>(T) * std::max(1e-6, 1.0 - phi * phi));
  };

  PosteriorChain chain;
  chain.kind = kind;
  chain.config = config;
  const std::int64_t n_keep = config.retained();
  chain.theta_draws.reserve(static_cast<std::size_t>(n_keep));
  chain.h_draws.reserve(static_cast<std::size_t>(n_keep));
  chain.deviance_draws.reserve(static_cast<std::size_t>(n_keep));

  double cur_ll = log_likelihood(p, ht[0], {ht.data() + 1, T}, returns);
  double cur_lp = log_prior(p, priors);

  for (std::int64_t iter = 1; iter <= config.total_iters; ++iter) {
    const bool adapting = iter <= config.adapt_window();
    const bool counting = iter > config.burn_in;
    const double mu = detail::mean_term(p);

    // Latent sites.
    const double hs = h_scale();
    for (std::size_t t = 0; t <= T; ++t) {
      StepSize& st = step_h[t];
      const double proposal = ht[t] + st.value() * hs * rng.normal();
      const double log_ratio = site_target(p, mu, ht, returns, t, proposal) -
                               site_target(p, mu, ht, returns, t, ht[t]);
      double aprob = 0.0;
      const bool acc = metropolis_accept(log_ratio, rng, aprob);
      if (acc) ht[t] = proposal;
      if (adapting) st.adapt(aprob, iter);
      if (counting) {
        ++st.proposed;
        if (acc) ++st.accepted;
      }
    }
    cur_ll = log_likelihood(p, ht[0], {ht.data() + 1, T}, returns);

    auto scalar_update = [&](StepSize& st, auto&& make_proposal, double log_jac_diff) {
      // make_proposal fills a candidate Theta; rejects outside support.
      ModelParams cand = p;
      if (!make_proposal(cand)) {
        rng.uniform_pos();
        if (adapting) st.adapt(0.0, iter);
        if (counting) ++st.proposed;
        return;
      }
      const double cand_ll = log_likelihood(cand, ht[0], {ht.data() + 1, T}, returns);
      const double cand_lp = log_prior(cand, priors);
      const double log_ratio = cand_ll + cand_lp - cur_ll - cur_lp + log_jac_diff;
      double aprob = 0.0;
      const bool acc = metropolis_accept(log_ratio, rng, aprob);
      if (acc) {
        p = cand;
        cur_ll = cand_ll;
        cur_lp = cand_lp;
      }
      if (adapting) st.adapt(aprob, iter);
      if (counting) {
        ++st.proposed;
        if (acc) ++st.accepted;
      }
    };

    // alpha: random walk on the natural scale.
    {
      const double z = rng.normal();
      scalar_update(
          step_alpha,
          [&](ModelParams& cand) {
            cand.alpha = p.alpha + step_alpha.value() * alpha_scale() * z;
            return true;
          },
          0.0);
    }

    // phi: random walk on atanh(phi); Jacobian d phi / d x = 1 - phi^2, plus
    // the Hastings term for the phi-dependent proposal scale.
    {
      const double z = rng.normal();
      const double x = std::atanh(p.phi);
      const double s_fwd = step_phi.value() * phi_scale(p.phi);
      const double cand_x = x + s_fwd * z;
      const double cand_phi = std::tanh(cand_x);
      const double s_rev = step_phi.value() * phi_scale(cand_phi);
      const double dx2 = (cand_x - x) * (cand_x - x);
      const double hastings = std::log(s_fwd / s_rev) +
                              0.5 * dx2 * (1.0 / (s_fwd * s_fwd) - 1.0 / (s_rev * s_rev));
      scalar_update(
          step_phi,
          [&](ModelParams& cand) {
            if (!(std::abs(cand_phi) < 1.0)) return false;
            cand.phi = cand_phi;
            return true;
          },
          std::log1p(-cand_phi * cand_phi) - std::log1p(-p.phi * p.phi) + hastings);
    }

    // sigma: random walk on log sigma; prior lives on sigma^2.
    {
      const double z = rng.normal();
      const double cand_sigma = p.sigma * std::exp(step_sigma.value() * z);
      // d sigma^2 / d log sigma = 2 sigma^2.
      const double jac = 2.0 * (std::log(cand_sigma) - std::log(p.sigma));
      scalar_update(
          step_sigma,
          [&](ModelParams& cand) {
            if (!(cand_sigma > 0.0) || !std::isfinite(cand_sigma)) return false;
            cand.sigma = cand_sigma;
            return true;
          },
          jac);
    }

    // Interweaved non-centered moves. Holding the standardized innovations
    // fixed and rebuilding the path under the proposal lets the measurement
    // density rather than the tight path conditionals drive sigma and phi;
    // a few repeats per sweep are what make the phi-sigma ridge traversable
    // within the fixed chain budget.
    auto nc_sigma_update = [&] {
      // Rescale path deviations with sigma. Transition terms cancel the
      // (T+1) log(ratio) volume change analytically.
      const double z = rng.normal();
      const double ratio = std::exp(step_sigma_nc.value() * z);
      const double cand_sigma = p.sigma * ratio;
      double aprob = 0.0;
      if (cand_sigma > 0.0 && std::isfinite(cand_sigma)) {
        ModelParams cand = p;
        cand.sigma = cand_sigma;
        std::vector<double> cand_h(T + 1);
        for (std::size_t t = 0; t <= T; ++t) {
          cand_h[t] = p.alpha + ratio * (ht[t] - p.alpha);
        }
        const double cand_ll =
            log_likelihood(cand, cand_h[0], {cand_h.data() + 1, T}, returns);
        const double cand_lp = log_prior(cand, priors);
        const double log_jac = (2.0 + static_cast<double>(T) + 1.0) * std::log(ratio);
        const double log_ratio = cand_ll + cand_lp - cur_ll - cur_lp + log_jac;
        if (metropolis_accept(log_ratio, rng, aprob)) {
          p = cand;
          ht = std::move(cand_h);
          cur_ll = cand_ll;
          cur_lp = cand_lp;
        }
      } else {
        rng.uniform_pos();
      }
      if (adapting) step_sigma_nc.adapt(aprob, iter);
    };

    auto nc_phi_update = [&] {
      const double z = rng.normal();
      const double x = std::atanh(p.phi);
      const double cand_phi = std::tanh(x + step_phi_nc.value() * z);
      double aprob = 0.0;
      if (std::abs(cand_phi) < 1.0) {
        ModelParams cand = p;
        cand.phi = cand_phi;
        std::vector<double> cand_h(T + 1);
        cand_h[0] = p.alpha + (ht[0] - p.alpha) *
                                  std::sqrt((1.0 - p.phi * p.phi) /
                                            (1.0 - cand_phi * cand_phi));
        for (std::size_t t = 1; t <= T; ++t) {
          const double eta =
              (ht[t] - p.alpha - p.phi * (ht[t - 1] - p.alpha)) / p.sigma;
          cand_h[t] = p.alpha + cand_phi * (cand_h[t - 1] - p.alpha) + p.sigma * eta;
        }
        const double cand_ll =
            log_likelihood(cand, cand_h[0], {cand_h.data() + 1, T}, returns);
        const double cand_lp = log_prior(cand, priors);
        // atanh measure and path-rebuild Jacobian combine to half the
        // log(1-phi^2) difference.
        const double log_jac =
            0.5 * (std::log1p(-cand_phi * cand_phi) - std::log1p(-p.phi * p.phi));
        const double log_ratio = cand_ll + cand_lp - cur_ll - cur_lp + log_jac;
        if (metropolis_accept(log_ratio, rng, aprob)) {
          p = cand;
          ht = std::move(cand_h);
          cur_ll = cand_ll;
          cur_lp = cand_lp;
        }
      } else {
        rng.uniform_pos();
      }
      if (adapting) step_phi_nc.adapt(aprob, iter);
    };

    for (int rep = 0; rep < 3; ++rep) {
      nc_sigma_update();
      nc_phi_update();
    }

    // rho: random walk on atanh(rho); flat prior on (-1,1).
    if (sample_rho) {
      const double z = rng.normal();
      const double w = std::atanh(p.rho);
      const double cand_rho = std::tanh(w + step_rho.value() * z);
      scalar_update(
          step_rho,
          [&](ModelParams& cand) {
            if (!(std::abs(cand_rho) < 1.0)) return false;
            cand.rho = cand_rho;
            return true;
          },
          std::log1p(-cand_rho * cand_rho) - std::log1p(-p.rho * p.rho));
    }

    if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
      chain.theta_draws.push_back(p);
      chain.h_draws.push_back(ht);
      chain.deviance_draws.push_back(
          -2.0 * detail::measurement_loglik(p, ht[0], {ht.data() + 1, T}, returns));
    }
  }

  double h_prop = 0.0, h_acc = 0.0;
  for (const auto& s : step_h) {
    h_prop += static_cast<double>(s.proposed);
    h_acc += static_cast<double>(s.accepted);
  }
  chain.acceptance.h = h_prop > 0.0 ? h_acc / h_prop : 0.0;
  chain.acceptance.alpha = step_alpha.rate();
  chain.acceptance.phi = step_phi.rate();
  chain.acceptance.sigma = step_sigma.rate();
  chain.acceptance.rho = sample_rho ? step_rho.rate() : 0.0;
  return chain;
}

std::vector<SummaryRow> posterior_summary(const PosteriorChain& chain) {
  if (chain.theta_draws.empty()) throw Error(Errc::EmptyChain, "no retained draws");
  const auto n = static_cast<double>(chain.theta_draws.size());

  auto row = [&](const std::string& name, auto&& get) {
    double mean = 0.0;
    for (const auto& d : chain.theta_draws) mean += get(d);
    mean /= n;
    double ss = 0.0;
    for (const auto& d : chain.theta_draws) {
      const double dev = get(d) - mean;
      ss += dev * dev;
    }
    const double sd = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return SummaryRow{name, mean, sd};
  };

  std::vector<SummaryRow> rows;
  rows.push_back(row("alpha", [](const ModelParams& d) { return d.alpha; }));
  rows.push_back(row("phi", [](const ModelParams& d) { return d.phi; }));
  rows.push_back(row("sigma", [](const ModelParams& d) { return d.sigma; }));
  if (chain.kind != ModelKind::Classical) {
    rows.push_back(row("rho", [](const ModelParams& d) { return d.rho; }));
  }
  return rows;
}

ModelParams posterior_mean_params(const PosteriorChain& chain) {
  if (chain.theta_draws.empty()) throw Error(Errc::EmptyChain, "no retained draws");
  ModelParams mean;
  mean.kind = chain.kind;
  mean.alpha = mean.phi = mean.rho = 0.0;
  mean.sigma = 0.0;
  const auto n = static_cast<double>(chain.theta_draws.size());
  for (const auto& d : chain.theta_draws) {
    mean.alpha += d.alpha;
    mean.phi += d.phi;
    mean.sigma += d.sigma;
    mean.rho += d.rho;
  }
  mean.alpha /= n;
  mean.phi /= n;
  mean.sigma /= n;
  mean.rho /= n;
  return mean;
}

std::vector<double> posterior_mean_path(const PosteriorChain& chain) {
  if (chain.h_draws.empty()) throw Error(Errc::EmptyChain, "no retained draws");
  std::vector<double> mean(chain.h_draws.front().size(), 0.0);
  for (const auto& h : chain.h_draws) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += h[i];
  }
  const auto n = static_cast<double>(chain.h_draws.size());
  for (auto& m : mean) m /= n;
  return mean;
}

double split_rhat(const std::vector<std::vector<double>>& per_chain_draws) {
  std::vector<std::vector<double>> halves;
  for (const auto& c : per_chain_draws) {
    const std::size_t n = c.size() / 2;
    if (n < 2) throw Error(Errc::TooShort, "chains too short for split R-hat");
    halves.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
    halves.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(n),
                        c.begin() + static_cast<std::ptrdiff_t>(2 * n));
  }
  const auto m = static_cast<double>(halves.size());
  const auto n = static_cast<double>(halves.front().size());

  std::vector<double> means;
  double grand = 0.0, w = 0.0;
  for (const auto& h : halves) {
    double mu = std::accumulate(h.begin(), h.end(), 0.0) / n;
    means.push_back(mu);
    grand += mu;
    double ss = 0.0;
    for (double x : h) ss += (x - mu) * (x - mu);
    w += ss / (n - 1.0);
  }
  grand /= m;
  w /= m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= n / (m - 1.0);
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

}  // namespace svol
