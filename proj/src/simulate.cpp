#include "svol/simulate.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "svol/moments.hpp"

namespace svol {

namespace {

constexpr std::int64_t kChunk = 1 << 15;

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Deterministic map-reduce: work is split into fixed-size chunks, chunk c
// draws from substream (seed, c), and partial results merge in chunk order.
// Output is therefore independent of the number of worker threads.
template <typename Acc, typename Fn>
Acc run_chunks(std::int64_t n, std::uint64_t seed, int threads, Fn fn) {
  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Acc> partials(static_cast<std::size_t>(n_chunks));
  std::atomic<std::int64_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const std::int64_t count = std::min<std::int64_t>(kChunk, n - c * kChunk);
      Rng rng(seed, static_cast<std::uint64_t>(c));
      fn(rng, c, count, partials[static_cast<std::size_t>(c)]);
    }
  };

  const int n_threads = std::min<std::int64_t>(resolve_threads(threads), n_chunks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Acc total{};
  for (const auto& part : partials) total.merge(part);
  return total;
}

struct SumAcc {
  double s = 0.0;
  double sq = 0.0;
  std::int64_t n = 0;

  void add(double x) noexcept {
    s += x;
    sq += x * x;
    ++n;
  }
  void merge(const SumAcc& o) noexcept {
    s += o.s;
    sq += o.sq;
    n += o.n;
  }
  McEstimate estimate() const noexcept {
    const double mean = s / static_cast<double>(n);
    double var = (sq - s * s / static_cast<double>(n)) / static_cast<double>(n - 1);
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
  }
};

double mean_term(const ModelParams& p) {
  return p.kind == ModelKind::MeanCorrected ? mean_correction(p) : 0.0;
}

}  // namespace

CorrelatedPair draw_correlated_pair(double rho, Rng& rng) noexcept {
  const double eta = rng.normal();
  const double z = rng.normal();
  return {rho * eta + std::sqrt(1.0 - rho * rho) * z, eta};
}

SeriesPair simulate_path(const ModelParams& p, const SimConfig& config,
                         std::uint64_t path_index) {
  validate(p);
  if (config.horizon < 1) throw Error(Errc::ConfigError, "horizon must be >= 1");

  Rng rng(config.seed, path_index);
  const double mu = mean_term(p);

  double h_prev;
  if (config.init == InitKind::Stationary) {
    h_prev = p.alpha + std::sqrt(stationary_variance(p)) * rng.normal();
  } else {
    h_prev = config.h0;
  }

  SeriesPair out;
  out.t0_state = h_prev;
  const auto horizon = static_cast<std::size_t>(config.horizon);
  out.returns.resize(horizon);
  out.volatility.emplace(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto [eps, eta] = draw_correlated_pair(p.rho, rng);
    const double h = p.alpha + p.phi * (h_prev - p.alpha) + p.sigma * eta;
    (*out.volatility)[t] = h;
    out.returns[t] = mu + std::exp(h / 2.0) * eps;
    h_prev = h;
  }
  return out;
}

namespace {

struct MomentAcc {
  SumAcc raw, m2, m3, m4;

  void merge(const MomentAcc& o) noexcept {
    raw.merge(o.raw);
    m2.merge(o.m2);
    m3.merge(o.m3);
    m4.merge(o.m4);
  }
};

}  // namespace

McMoments mc_moments(const ModelParams& p, std::int64_t n, std::uint64_t seed,
                     int threads) {
  validate(p);
  if (n < 1) throw Error(Errc::ConfigError, "n must be >= 1");

  const double mu = mean_term(p);
  // Exact model mean: 0 for Classical/MeanCorrected, -mu(Theta) for Correlated.
  const double center =
      p.kind == ModelKind::Correlated ? -mean_correction(p) : 0.0;
  const double sd_h = std::sqrt(stationary_variance(p));

  auto acc = run_chunks<MomentAcc>(
      n, seed, threads,
      [&](Rng& rng, std::int64_t, std::int64_t count, MomentAcc& a) {
        for (std::int64_t i = 0; i < count; ++i) {
          const double h_prev = p.alpha + sd_h * rng.normal();
          const auto [eps, eta] = draw_correlated_pair(p.rho, rng);
          const double h = p.alpha + p.phi * (h_prev - p.alpha) + p.sigma * eta;
          const double r = mu + std::exp(h / 2.0) * eps;
          const double x = r - center;
          const double x2 = x * x;
          a.raw.add(r);
          a.m2.add(x2);
          a.m3.add(x2 * x);
          a.m4.add(x2 * x2);
        }
      });

  return {acc.raw.estimate(), acc.m2.estimate(), acc.m3.estimate(),
          acc.m4.estimate()};
}

namespace {

struct LeadLagAcc {
  std::vector<SumAcc> lags;

  void merge(const LeadLagAcc& o) {
    if (lags.empty()) {
      lags = o.lags;
      return;
    }
    for (std::size_t i = 0; i < lags.size(); ++i) lags[i].merge(o.lags[i]);
  }
};

}  // namespace

std::vector<McEstimate> mc_leadlag(const ModelParams& p, int k_max, std::int64_t n,
                                   std::uint64_t seed, int threads) {
  validate(p);
  if (k_max < 1) throw Error(Errc::ConfigError, "k_max must be >= 1");
  if (n < 1) throw Error(Errc::ConfigError, "n must be >= 1");

  const double mu = mean_term(p);
  const double sd_h = std::sqrt(stationary_variance(p));
  const int len = 2 * k_max + 1;

  auto acc = run_chunks<LeadLagAcc>(
      n, seed, threads,
      [&](Rng& rng, std::int64_t, std::int64_t count, LeadLagAcc& a) {
        a.lags.resize(static_cast<std::size_t>(len));
        std::vector<double> h(static_cast<std::size_t>(len));
        for (std::int64_t i = 0; i < count; ++i) {
          // One stationary segment h_1..h_{2k+1}; the return sits at the center.
          double h_prev = p.alpha + sd_h * rng.normal();
          double eta_center = 0.0;
          for (int t = 0; t < len; ++t) {
            const double eta = rng.normal();
            h_prev = p.alpha + p.phi * (h_prev - p.alpha) + p.sigma * eta;
            h[static_cast<std::size_t>(t)] = h_prev;
            if (t == k_max) eta_center = eta;
          }
          const double eps = p.rho * eta_center +
                             std::sqrt(1.0 - p.rho * p.rho) * rng.normal();
          const double r =
              mu + std::exp(h[static_cast<std::size_t>(k_max)] / 2.0) * eps;
          for (int j = 0; j < len; ++j) {
            a.lags[static_cast<std::size_t>(j)].add(
                r * (h[static_cast<std::size_t>(j)] - p.alpha));
          }
        }
      });

  std::vector<McEstimate> out;
  out.reserve(static_cast<std::size_t>(len));
  for (const auto& s : acc.lags) out.push_back(s.estimate());
  return out;
}

McEstimate mc_path_return_mean(const ModelParams& p, std::int64_t n_paths,
                               std::int64_t horizon, std::uint64_t seed,
                               int threads) {
  validate(p);
  if (n_paths < 1 || horizon < 1) {
    throw Error(Errc::ConfigError, "n_paths and horizon must be >= 1");
  }

  const double mu = mean_term(p);
  const double sd_h = std::sqrt(stationary_variance(p));

  // Chunks index blocks of whole paths; each path owns substream (seed, path).
  constexpr std::int64_t kPathsPerChunk = 256;
  const std::int64_t n_chunks = (n_paths + kPathsPerChunk - 1) / kPathsPerChunk;
  std::vector<SumAcc> partials(static_cast<std::size_t>(n_chunks));
  std::atomic<std::int64_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      SumAcc& a = partials[static_cast<std::size_t>(c)];
      const std::int64_t lo = c * kPathsPerChunk;
      const std::int64_t hi = std::min(n_paths, lo + kPathsPerChunk);
      for (std::int64_t path = lo; path < hi; ++path) {
        Rng rng(seed, static_cast<std::uint64_t>(path));
        double h_prev = p.alpha + sd_h * rng.normal();
        for (std::int64_t t = 0; t < horizon; ++t) {
          const auto [eps, eta] = draw_correlated_pair(p.rho, rng);
          h_prev = p.alpha + p.phi * (h_prev - p.alpha) + p.sigma * eta;
          a.add(mu + std::exp(h_prev / 2.0) * eps);
        }
      }
    }
  };

  const int n_threads = std::min<std::int64_t>(resolve_threads(threads), n_chunks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SumAcc total{};
  for (const auto& part : partials) total.merge(part);
  return total.estimate();
}

}  // namespace svol
