#include <doctest.h>

#include <cmath>

#include "svol/moments.hpp"
#include "svol/simulate.hpp"
#include "test_util.hpp"

using namespace svol;
using test::make_params;
using test::within_se;

TEST_CASE("correlated pair: independent marginals at rho = 0") {
  Rng rng(7);
  const int n = 200000;
  double se = 0, sn = 0, see = 0, snn = 0, sen = 0;
  for (int i = 0; i < n; ++i) {
    const auto [eps, eta] = draw_correlated_pair(0.0, rng);
    se += eps;
    sn += eta;
    see += eps * eps;
    snn += eta * eta;
    sen += eps * eta;
  }
  const double tol = 4.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(se / n) < tol);
  CHECK(std::abs(sn / n) < tol);
  CHECK(std::abs(see / n - 1.0) < 2.0 * tol);
  CHECK(std::abs(snn / n - 1.0) < 2.0 * tol);
  CHECK(std::abs(sen / n) < tol);
}

TEST_CASE("correlated pair: degenerate limit rho -> 1") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto [eps, eta] = draw_correlated_pair(1.0 - 1e-12, rng);
    CHECK(std::abs(eps - eta) < 1e-5);
  }
}

TEST_CASE("correlated pair: sample correlation matches rho = 0.5") {
  Rng rng(9);
  const int n = 1000000;
  double sen = 0, see = 0, snn = 0;
  for (int i = 0; i < n; ++i) {
    const auto [eps, eta] = draw_correlated_pair(0.5, rng);
    sen += eps * eta;
    see += eps * eps;
    snn += eta * eta;
  }
  const double corr = sen / std::sqrt(see * snn);
  CHECK(std::abs(corr - 0.5) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("degenerate volatility: sigma tiny gives iid N(0,1) returns") {
  auto p = make_params(0, 0, 1e-8, 0, ModelKind::Classical);
  SimConfig cfg;
  cfg.horizon = 100000;
  cfg.seed = 10;
  const auto path = simulate_path(p, cfg);
  REQUIRE(path.volatility.has_value());

  double max_h = 0, sum = 0, sumsq = 0;
  for (std::size_t t = 0; t < path.returns.size(); ++t) {
    max_h = std::max(max_h, std::abs((*path.volatility)[t]));
    sum += path.returns[t];
    sumsq += path.returns[t] * path.returns[t];
  }
  const auto n = static_cast<double>(path.returns.size());
  CHECK(max_h < 1e-6);
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sumsq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("simulation is deterministic given the seed and path index") {
  const auto p = test::table1_params();
  SimConfig cfg;
  cfg.horizon = 500;
  cfg.seed = 77;

  const auto a = simulate_path(p, cfg, 3);
  const auto b = simulate_path(p, cfg, 3);
  CHECK(a.returns == b.returns);
  CHECK(*a.volatility == *b.volatility);
  CHECK(a.t0_state == b.t0_state);

  const auto c = simulate_path(p, cfg, 4);
  CHECK(a.returns != c.returns);
}

TEST_CASE("mean-corrected returns are a martingale difference in sample") {
  const auto p = make_params(0, 0.9, 0.3, -0.5);
  const auto est = mc_path_return_mean(p, 10000, 100, 11);
  CHECK(est.n == 1000000);
  CHECK(within_se(est.value, 0.0, est.std_error));
}

TEST_CASE("uncorrected correlated returns have mean -mu") {
  const auto p = make_params(0, 0, 1, 0.8, ModelKind::Correlated);
  const auto est = mc_path_return_mean(p, 100000, 100, 12);
  // -mu = 0.4 e^{1/8}
  CHECK(within_se(est.value, 0.4532593812267305, est.std_error));
  CHECK(std::abs(est.value) > 4.0 * est.std_error);
}

TEST_CASE("mc_moments: rho = 0 sanity against closed forms") {
  const auto p = make_params(0, 0, 1, 0, ModelKind::Classical);
  const auto m = mc_moments(p, 1000000, 13);
  CHECK(within_se(m.variance.value, 1.6487212707001282, m.variance.std_error));
  CHECK(within_se(m.mean.value, 0.0, m.mean.std_error));
}

TEST_CASE("mc_moments: mean estimates -mean_correction for the correlated model") {
  const auto p = make_params(0, 0.9, 0.3, -0.5, ModelKind::Correlated);
  const auto m = mc_moments(p, 1000000, 14);
  CHECK(within_se(m.mean.value, -mean_correction(p), m.mean.std_error));
}

TEST_CASE("mc_moments: mu4 at the unit lognormal point") {
  const auto p = make_params(0, 0, 1, 0, ModelKind::Classical);
  const auto m = mc_moments(p, 10000000, 15);
  CHECK(within_se(m.mu4.value, 3.0 * std::exp(2.0), m.mu4.std_error));
}

TEST_CASE("mc_moments is invariant to the thread count") {
  const auto p = make_params(-1, 0.5, 0.5, 0.3);
  const auto a = mc_moments(p, 200000, 16, /*threads=*/1);
  const auto b = mc_moments(p, 200000, 16, /*threads=*/2);
  CHECK(a.mean.value == b.mean.value);
  CHECK(a.mu4.value == b.mu4.value);
  CHECK(a.mu4.std_error == b.mu4.std_error);
}

TEST_CASE("stationary initialization leaves no transient in the latent process") {
  const auto p = make_params(-1, 0.9, 0.3, 0.2);
  SimConfig cfg;
  cfg.horizon = 10;
  cfg.seed = 17;

  const int n_paths = 20000;
  const double var_h = stationary_variance(p);
  std::vector<double> sum(cfg.horizon, 0.0), sumsq(cfg.horizon, 0.0);
  for (int i = 0; i < n_paths; ++i) {
    const auto path = simulate_path(p, cfg, static_cast<std::uint64_t>(i));
    for (std::size_t t = 0; t < path.volatility->size(); ++t) {
      const double h = (*path.volatility)[t];
      sum[t] += h;
      sumsq[t] += h * h;
    }
  }
  for (std::size_t t = 0; t < sum.size(); ++t) {
    const double mean = sum[t] / n_paths;
    const double var = sumsq[t] / n_paths - mean * mean;
    const double se_mean = std::sqrt(var_h / n_paths);
    const double se_var = var_h * std::sqrt(2.0 / (n_paths - 1));
    CHECK(within_se(mean, p.alpha, se_mean));
    CHECK(within_se(var, var_h, se_var));
  }
}

TEST_CASE("mc_leadlag: zero at rho = 0, matches closed forms otherwise") {
  {
    const auto p = make_params(-1, 0.9, 0.3, 0.0, ModelKind::Classical);
    const auto est = mc_leadlag(p, 2, 200000, 18);
    for (const auto& e : est) CHECK(within_se(e.value, 0.0, e.std_error));
  }
  {
    const auto p = make_params(0, 0.9, 0.3, 0.5);
    const auto profile = leadlag(p, 1);
    const auto est = mc_leadlag(p, 1, 1000000, 19);
    CHECK(within_se(est[2].value, profile.lead_cov[0], est[2].std_error));
    CHECK(within_se(est[0].value, profile.lag_cov[0], est[0].std_error));
    CHECK(within_se(est[1].value, profile.sigma_rh, est[1].std_error));
  }
}
