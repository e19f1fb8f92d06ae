// Command-line driver: simulate / moments / verify / fit / gof / report.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "svol/config.hpp"
#include "svol/csv.hpp"
#include "svol/gof.hpp"
#include "svol/inference.hpp"
#include "svol/manifest.hpp"
#include "svol/moments.hpp"
#include "svol/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ThetaFlags {
  std::string model = "svm0";
  double alpha = 0.0;
  double phi = 0.0;
  double sigma = 1.0;
  double rho = 0.0;
};

void add_theta_options(CLI::App* cmd, ThetaFlags& t) {
  cmd->add_option("--model", t.model, "Model variant: svm0|svmrho|svmrhomu");
  cmd->add_option("--alpha", t.alpha, "Long-range log-volatility level");
  cmd->add_option("--phi", t.phi, "AR(1) persistence, |phi| < 1");
  cmd->add_option("--sigma", t.sigma, "Volatility of volatility, > 0");
  cmd->add_option("--rho", t.rho, "Error correlation in (-1,1)");
}

svol::ModelParams to_params(const ThetaFlags& t) {
  svol::ModelParams p;
  p.kind = svol::model_kind_from_string(t.model);
  p.alpha = t.alpha;
  p.phi = t.phi;
  p.sigma = t.sigma;
  p.rho = t.rho;
  svol::validate(p);
  return p;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

json theta_json(const svol::ModelParams& p) {
  return {{"model", svol::to_string(p.kind)},
          {"alpha", p.alpha},
          {"phi", p.phi},
          {"sigma", p.sigma},
          {"rho", p.rho}};
}

json moments_json(const svol::MomentSet& m) {
  return {{"mu", m.mu},           {"variance", m.variance}, {"mu3", m.mu3},
          {"mu4", m.mu4},         {"skewness", m.skewness}, {"kurtosis", m.kurtosis}};
}

void dump_json(const fs::path& file, const json& j) {
  std::ofstream out(file);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// verify: closed forms vs the Monte Carlo oracle

struct VerifyRow {
  svol::ModelParams theta;
  std::string stat;
  double closed;
  svol::McEstimate mc;
  bool pass;
};

VerifyRow make_row(const svol::ModelParams& theta, std::string stat, double closed,
                   const svol::McEstimate& mc) {
  const bool pass = std::abs(mc.value - closed) <= 4.0 * mc.std_error;
  return {theta, std::move(stat), closed, mc, pass};
}

std::vector<VerifyRow> verify_point(const svol::ModelParams& base, int k_max,
                                    std::int64_t n, std::int64_t n_mu4,
                                    std::uint64_t seed, int threads) {
  std::vector<VerifyRow> rows;

  svol::ModelParams corr = base;
  corr.kind = svol::ModelKind::Correlated;
  svol::ModelParams mc_kind = base;
  mc_kind.kind = svol::ModelKind::MeanCorrected;

  // -mu against the sample mean of the uncorrected correlated model.
  const auto mean_est = svol::mc_moments(corr, n, svol::mix_seed(seed, 1), threads);
  rows.push_back(make_row(corr, "neg_mean_correction",
                          -svol::mean_correction(base), mean_est.mean));

  // Central moments against the mean-corrected model.
  const auto mom = svol::mc_moments(mc_kind, n, svol::mix_seed(seed, 2), threads);
  rows.push_back(make_row(mc_kind, "variance", svol::variance(base), mom.variance));
  rows.push_back(make_row(mc_kind, "mu3", svol::third_moment(base), mom.mu3));
  svol::McEstimate mu4_est = mom.mu4;
  if (n_mu4 > n && base.phi >= 0.95) {
    mu4_est = svol::mc_moments(mc_kind, n_mu4, svol::mix_seed(seed, 3), threads).mu4;
  }
  rows.push_back(make_row(mc_kind, "mu4", svol::fourth_moment(base), mu4_est));

  // Lead-lag covariances.
  const auto profile = svol::leadlag(base, k_max);
  const auto ll = svol::mc_leadlag(mc_kind, k_max, n, svol::mix_seed(seed, 4), threads);
  rows.push_back(make_row(mc_kind, "sigma_rh", profile.sigma_rh,
                          ll[static_cast<std::size_t>(k_max)]));
  for (int k = 1; k <= k_max; ++k) {
    rows.push_back(make_row(mc_kind, "lead_cov_" + std::to_string(k),
                            profile.lead_cov[static_cast<std::size_t>(k - 1)],
                            ll[static_cast<std::size_t>(k_max + k)]));
    rows.push_back(make_row(mc_kind, "lag_cov_" + std::to_string(k),
                            profile.lag_cov[static_cast<std::size_t>(k - 1)],
                            ll[static_cast<std::size_t>(k_max - k)]));
  }
  return rows;
}

std::vector<svol::ModelParams> default_grid() {
  static const double alphas[] = {-8.0, -1.0, 0.0};
  static const double phis[] = {0.0, 0.5, 0.95};
  static const double sigmas[] = {0.1, 0.5, 1.0};
  static const double rhos[] = {-0.8, -0.3, 0.0, 0.3, 0.8};
  std::vector<svol::ModelParams> grid;
  for (double a : alphas)
    for (double f : phis)
      for (double s : sigmas)
        for (double r : rhos) {
          svol::ModelParams p;
          p.alpha = a;
          p.phi = f;
          p.sigma = s;
          p.rho = r;
          p.kind = svol::ModelKind::MeanCorrected;
          grid.push_back(p);
        }
  return grid;
}

// ---------------------------------------------------------------------------
// fit artifacts on disk

void write_fit_outputs(const fs::path& dir, const svol::PosteriorChain& chain,
                       std::span<const double> returns) {
  svol::CsvTable table;
  table.header = {"iter", "alpha", "phi", "sigma", "rho", "mu", "deviance"};
  for (std::size_t i = 0; i < chain.theta_draws.size(); ++i) {
    const auto& d = chain.theta_draws[i];
    const double mu =
        d.kind == svol::ModelKind::MeanCorrected ? svol::mean_correction(d) : 0.0;
    const std::int64_t iter =
        chain.config.burn_in + static_cast<std::int64_t>(i + 1) * chain.config.thin;
    table.rows.push_back({std::to_string(iter), svol::format_double(d.alpha),
                          svol::format_double(d.phi), svol::format_double(d.sigma),
                          svol::format_double(d.rho), svol::format_double(mu),
                          svol::format_double(chain.deviance_draws[i])});
  }
  svol::write_csv(dir / "chain.csv", table);

  const auto mean_path = svol::posterior_mean_path(chain);
  svol::CsvTable hmean;
  hmean.header = {"t", "h"};
  for (std::size_t t = 0; t < mean_path.size(); ++t) {
    hmean.rows.push_back({std::to_string(t), svol::format_double(mean_path[t])});
  }
  svol::write_csv(dir / "hmean.csv", hmean);

  json summary;
  summary["model"] = svol::to_string(chain.kind);
  summary["observations"] = returns.size();
  summary["retained_draws"] = chain.theta_draws.size();
  summary["seed"] = chain.config.seed;
  summary["chain"] = {{"total_iters", chain.config.total_iters},
                      {"burn_in", chain.config.burn_in},
                      {"thin", chain.config.thin},
                      {"adapt_iters", chain.config.adapt_window()}};
  json rows = json::array();
  for (const auto& row : svol::posterior_summary(chain)) {
    rows.push_back({{"parameter", row.parameter}, {"mean", row.mean}, {"sd", row.sd}});
  }
  summary["posterior"] = rows;
  summary["acceptance"] = {{"h", chain.acceptance.h},
                           {"alpha", chain.acceptance.alpha},
                           {"phi", chain.acceptance.phi},
                           {"sigma", chain.acceptance.sigma},
                           {"rho", chain.acceptance.rho}};
  dump_json(dir / "summary.json", summary);
}

struct FitArtifacts {
  svol::ModelKind kind = svol::ModelKind::Classical;
  svol::ModelParams plug_in;
  std::vector<double> mu_draws;
  std::vector<double> deviance_draws;
  std::vector<double> h_mean;  // h_0..h_T
};

FitArtifacts load_fit(const fs::path& dir) {
  FitArtifacts art;

  std::ifstream in(dir / "summary.json");
  if (!in) {
    throw svol::Error(svol::Errc::ParseError,
                      "missing " + (dir / "summary.json").string());
  }
  json summary = json::parse(in);
  art.kind = svol::model_kind_from_string(summary.at("model").get<std::string>());
  art.plug_in.kind = art.kind;
  for (const auto& row : summary.at("posterior")) {
    const std::string name = row.at("parameter").get<std::string>();
    const double mean = row.at("mean").get<double>();
    if (name == "alpha") art.plug_in.alpha = mean;
    else if (name == "phi") art.plug_in.phi = mean;
    else if (name == "sigma") art.plug_in.sigma = mean;
    else if (name == "rho") art.plug_in.rho = mean;
  }
  svol::validate(art.plug_in);

  const auto chain = svol::read_csv(dir / "chain.csv");
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < chain.header.size(); ++i) {
      if (chain.header[i] == name) return i;
    }
    throw svol::Error(svol::Errc::ParseError, "chain.csv lacks column " + name);
  };
  const std::size_t mu_col = col("mu");
  const std::size_t dev_col = col("deviance");
  for (const auto& row : chain.rows) {
    art.mu_draws.push_back(std::stod(row[mu_col]));
    art.deviance_draws.push_back(std::stod(row[dev_col]));
  }

  const auto hmean = svol::read_csv(dir / "hmean.csv");
  for (const auto& row : hmean.rows) art.h_mean.push_back(std::stod(row[1]));
  return art;
}

struct GofNumbers {
  svol::Descriptive descriptive;
  svol::MomentSet model_moments;
  double model_return_mean;
  double mean_deviance;
  double mspe;
  std::map<int, double> empirical;
};

GofNumbers gof_from_artifacts(const FitArtifacts& art,
                              std::span<const double> returns, int k_max) {
  GofNumbers g;
  g.descriptive = svol::descriptive_stats(returns);
  g.model_moments = svol::moment_set(art.plug_in);
  g.model_return_mean =
      art.kind == svol::ModelKind::Correlated ? -g.model_moments.mu : 0.0;

  double dev = 0.0;
  for (double d : art.deviance_draws) dev += d;
  g.mean_deviance = dev / static_cast<double>(art.deviance_draws.size());

  double rhat = 0.0;
  for (double m : art.mu_draws) rhat += m;
  rhat /= static_cast<double>(art.mu_draws.size());
  double sum = 0.0;
  for (double r : returns) sum += (r - rhat) * (r - rhat);
  g.mspe = sum / static_cast<double>(returns.size());

  if (art.h_mean.size() != returns.size() + 1) {
    throw svol::Error(svol::Errc::LengthMismatch,
                      "hmean.csv length does not match the return series");
  }
  g.empirical = svol::empirical_leadlag(
      returns, {art.h_mean.data() + 1, art.h_mean.size() - 1}, k_max);
  return g;
}

json gof_json(const GofNumbers& g) {
  json j;
  j["descriptive"] = {{"mean", g.descriptive.mean},
                      {"variance", g.descriptive.variance},
                      {"skewness", g.descriptive.skewness},
                      {"kurtosis", g.descriptive.kurtosis}};
  j["model_moments"] = moments_json(g.model_moments);
  j["model_return_mean"] = g.model_return_mean;
  j["mean_deviance"] = g.mean_deviance;
  j["mspe"] = g.mspe;
  json ll = json::object();
  for (const auto& [lag, corr] : g.empirical) ll[std::to_string(lag)] = corr;
  j["empirical_leadlag"] = ll;
  return j;
}

std::string fmt_cell(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

// Plain-text GOF comparison table: rows of measures, one column for the
// data and one per fitted model.
std::string gof_table(const std::vector<std::string>& model_names,
                      const std::vector<GofNumbers>& gofs, int k_max) {
  const auto& d = gofs.front().descriptive;
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;

  auto model_cells = [&](auto&& fn) {
    std::vector<std::string> cells;
    for (const auto& g : gofs) cells.push_back(fn(g));
    return cells;
  };

  rows.push_back({"Mean", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.model_return_mean);
                  })});
  rows.back().second.insert(rows.back().second.begin(), fmt_cell(d.mean));
  rows.push_back({"Variance", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.model_moments.variance);
                  })});
  rows.back().second.insert(rows.back().second.begin(), fmt_cell(d.variance));
  rows.push_back({"Skewness", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.model_moments.skewness);
                  })});
  rows.back().second.insert(rows.back().second.begin(), fmt_cell(d.skewness));
  rows.push_back({"Kurtosis", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.model_moments.kurtosis);
                  })});
  rows.back().second.insert(rows.back().second.begin(), fmt_cell(d.kurtosis));

  rows.push_back({"corr(r,h)", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.empirical.at(0));
                  })});
  rows.back().second.insert(rows.back().second.begin(), "");
  rows.push_back({"corr(r,h[t-" + std::to_string(k_max) + "])",
                  model_cells([&](const GofNumbers& g) {
                    return fmt_cell(g.empirical.at(-k_max));
                  })});
  rows.back().second.insert(rows.back().second.begin(), "");

  rows.push_back({"Deviance", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.mean_deviance);
                  })});
  rows.back().second.insert(rows.back().second.begin(), "");
  rows.push_back({"MSPE", model_cells([](const GofNumbers& g) {
                    return fmt_cell(g.mspe);
                  })});
  rows.back().second.insert(rows.back().second.begin(), "");

  std::vector<std::string> headers = {"GOF measure", "data"};
  headers.insert(headers.end(), model_names.begin(), model_names.end());

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  for (const auto& [label, cells] : rows) {
    widths[0] = std::max(widths[0], label.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      widths[c + 1] = std::max(widths[c + 1], cells[c].size());
    }
  }

  std::ostringstream os;
  for (std::size_t c = 0; c < headers.size(); ++c) {
    os << std::left << std::setw(static_cast<int>(widths[c]) + 2) << headers[c];
  }
  os << '\n';
  for (const auto& [label, cells] : rows) {
    os << std::left << std::setw(static_cast<int>(widths[0]) + 2) << label;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      os << std::left << std::setw(static_cast<int>(widths[c + 1]) + 2) << cells[c];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic volatility toolkit: correlated-error SVMs with "
               "mean correction, closed-form moments, Monte Carlo "
               "verification, and Bayesian fitting"};
  app.set_version_flag("--version", svol::kToolVersion);
  app.require_subcommand(1);

  // ---- simulate --------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Simulate exact paths to CSV");
  ThetaFlags sim_theta;
  add_theta_options(sim, sim_theta);
  std::int64_t sim_horizon = 1000, sim_npaths = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_init = "stationary", sim_out = "out_simulate";
  double sim_h0 = 0.0;
  int sim_threads = 0;
  sim->add_option("--horizon", sim_horizon, "Path length T");
  sim->add_option("--n-paths", sim_npaths, "Number of independent paths");
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_option("--init", sim_init, "Initialization: stationary|fixed");
  sim->add_option("--h0", sim_h0, "Fixed h_0 (with --init fixed)");
  sim->add_option("--threads", sim_threads, "Path-parallel workers (0 = all cores)");
  sim->add_option("--out", sim_out, "Output directory");

  // ---- moments ---------------------------------------------------------
  auto* mom = app.add_subcommand("moments", "Closed-form moments and lead-lag profile");
  ThetaFlags mom_theta;
  add_theta_options(mom, mom_theta);
  int mom_kmax = 3;
  std::string mom_out = "out_moments";
  mom->add_option("--kmax", mom_kmax, "Largest lead/lag");
  mom->add_option("--out", mom_out, "Output directory");

  // ---- verify ----------------------------------------------------------
  auto* ver = app.add_subcommand(
      "verify", "Closed forms vs the Monte Carlo oracle (exit 0 iff all pass)");
  ThetaFlags ver_theta;
  add_theta_options(ver, ver_theta);
  std::int64_t ver_n = 1000000, ver_n_mu4 = 10000000;
  int ver_kmax = 3, ver_threads = 0;
  std::uint64_t ver_seed = 1;
  std::string ver_out = "out_verify";
  ver->add_option("--n", ver_n, "MC draws per statistic");
  ver->add_option("--n-mu4", ver_n_mu4, "MC draws for mu4 when phi >= 0.95");
  ver->add_option("--kmax", ver_kmax, "Largest lead/lag");
  ver->add_option("--seed", ver_seed, "Master seed");
  ver->add_option("--threads", ver_threads, "Worker threads (0 = all cores)");
  ver->add_option("--out", ver_out, "Output directory");
  bool ver_single = false;
  ver->add_flag("--single", ver_single,
                "Verify only the point given by --alpha/--phi/--sigma/--rho");

  // ---- fit -------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Bayesian MCMC fit of one variant");
  std::string fit_input, fit_mode = "returns", fit_model = "svm0";
  std::string fit_config_file, fit_out = "out_fit";
  std::int64_t fit_iters = -1, fit_burn = -1, fit_thin = -1, fit_adapt = -2;
  std::uint64_t fit_seed = 0;
  int fit_chains = 1, fit_threads = 0;
  bool fit_seed_set = false;
  fit->add_option("--input", fit_input, "CSV of dated prices or returns")->required();
  fit->add_option("--mode", fit_mode, "Input mode: returns|prices");
  fit->add_option("--model", fit_model, "Model variant: svm0|svmrho|svmrhomu");
  fit->add_option("--config", fit_config_file, "Key-value config file");
  fit->add_option("--iters", fit_iters, "Total chain length");
  fit->add_option("--burn", fit_burn, "Burn-in iterations");
  fit->add_option("--thin", fit_thin, "Thinning interval");
  fit->add_option("--adapt", fit_adapt, "Adaptation window (<= burn-in)");
  fit->add_option("--seed", fit_seed, "Chain seed")->each([&](const std::string&) {
    fit_seed_set = true;
  });
  fit->add_option("--chains", fit_chains, "Independent chains (R-hat when > 1)");
  fit->add_option("--threads", fit_threads, "Parallel chains cap");
  fit->add_option("--out", fit_out, "Output directory");

  // ---- gof -------------------------------------------------------------
  auto* gof = app.add_subcommand("gof", "Goodness-of-fit report for one fit");
  std::string gof_input, gof_mode = "returns", gof_fit_dir, gof_out = "out_gof";
  int gof_kmax = 10;
  gof->add_option("--input", gof_input, "CSV the model was fitted to")->required();
  gof->add_option("--mode", gof_mode, "Input mode: returns|prices");
  gof->add_option("--fit", gof_fit_dir, "Directory produced by `svol fit`")->required();
  gof->add_option("--kmax", gof_kmax, "Largest lead/lag in the report");
  gof->add_option("--out", gof_out, "Output directory");

  // ---- report ----------------------------------------------------------
  auto* rep = app.add_subcommand("report", "Combined GOF table across fitted models");
  std::string rep_input, rep_mode = "returns", rep_out = "out_report";
  std::string rep_svm0, rep_svmrho, rep_svmrhomu;
  int rep_kmax = 10;
  rep->add_option("--input", rep_input, "CSV the models were fitted to")->required();
  rep->add_option("--mode", rep_mode, "Input mode: returns|prices");
  rep->add_option("--fit-svm0", rep_svm0, "Fit directory for svm0");
  rep->add_option("--fit-svmrho", rep_svmrho, "Fit directory for svmrho");
  rep->add_option("--fit-svmrhomu", rep_svmrhomu, "Fit directory for svmrhomu");
  rep->add_option("--kmax", rep_kmax, "Largest lead/lag in the report");
  rep->add_option("--out", rep_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto p = to_params(sim_theta);
      svol::SimConfig cfg;
      cfg.horizon = sim_horizon;
      cfg.n_paths = sim_npaths;
      cfg.seed = sim_seed;
      if (sim_init == "fixed") {
        cfg.init = svol::InitKind::Fixed;
        cfg.h0 = sim_h0;
      } else if (sim_init != "stationary") {
        throw svol::Error(svol::Errc::ConfigError, "--init must be stationary|fixed");
      }
      // Each path owns substream (seed, index); results land by index, so
      // the CSV is identical whatever the thread count.
      std::vector<svol::SeriesPair> paths(static_cast<std::size_t>(sim_npaths));
      {
        const unsigned hw = std::thread::hardware_concurrency();
        const int workers = std::max(1, std::min<int>(
            sim_threads > 0 ? sim_threads : (hw == 0 ? 1 : static_cast<int>(hw)),
            static_cast<int>(sim_npaths)));
        std::atomic<std::int64_t> next{0};
        auto worker = [&] {
          for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= sim_npaths) break;
            paths[static_cast<std::size_t>(i)] =
                svol::simulate_path(p, cfg, static_cast<std::uint64_t>(i));
          }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
      }
      const auto dir = ensure_out_dir(sim_out);
      svol::write_path_csv(dir / "path.csv", paths);
      svol::RunManifest man;
      man.command = "simulate";
      man.seed = sim_seed;
      man.config["model"] = sim_theta.model;
      man.config["alpha"] = svol::format_double(p.alpha);
      man.config["phi"] = svol::format_double(p.phi);
      man.config["sigma"] = svol::format_double(p.sigma);
      man.config["rho"] = svol::format_double(p.rho);
      man.config["horizon"] = std::to_string(sim_horizon);
      man.config["n_paths"] = std::to_string(sim_npaths);
      man.config["init"] = sim_init;
      man.outputs = {"path.csv"};
      svol::write_manifest(dir, man);
      std::cout << "wrote " << (dir / "path.csv").string() << "\n";
      return 0;
    }

    if (*mom) {
      const auto p = to_params(mom_theta);
      const auto ms = svol::moment_set(p);
      const auto profile = svol::leadlag(p, mom_kmax);
      json j;
      j["theta"] = theta_json(p);
      j["moments"] = moments_json(ms);
      j["leadlag"] = {{"sigma_rh", profile.sigma_rh},
                      {"corr_rh", profile.corr_rh},
                      {"lead_cov", profile.lead_cov},
                      {"lag_cov", profile.lag_cov},
                      {"lead_corr", profile.lead_corr},
                      {"lag_corr", profile.lag_corr}};
      const auto dir = ensure_out_dir(mom_out);
      dump_json(dir / "moments.json", j);
      svol::RunManifest man;
      man.command = "moments";
      man.config["model"] = mom_theta.model;
      man.config["kmax"] = std::to_string(mom_kmax);
      man.outputs = {"moments.json"};
      svol::write_manifest(dir, man);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*ver) {
      std::vector<svol::ModelParams> points;
      if (ver_single) {
        svol::ModelParams p;
        p.alpha = ver_theta.alpha;
        p.phi = ver_theta.phi;
        p.sigma = ver_theta.sigma;
        p.rho = ver_theta.rho;
        p.kind = svol::ModelKind::MeanCorrected;
        points.push_back(p);
      } else {
        points = default_grid();
      }

      json rows = json::array();
      std::size_t failures = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto point_rows =
            verify_point(points[i], ver_kmax, ver_n, ver_n_mu4,
                         svol::mix_seed(ver_seed, i), ver_threads);
        for (const auto& row : point_rows) {
          if (!row.pass) ++failures;
          rows.push_back({{"theta", theta_json(row.theta)},
                          {"stat", row.stat},
                          {"closed_form", row.closed},
                          {"mc_value", row.mc.value},
                          {"mc_std_error", row.mc.std_error},
                          {"n", row.mc.n},
                          {"pass", row.pass}});
        }
      }
      json j;
      j["n"] = ver_n;
      j["n_mu4"] = ver_n_mu4;
      j["seed"] = ver_seed;
      j["checks"] = rows.size();
      j["failures"] = failures;
      j["rows"] = rows;
      const auto dir = ensure_out_dir(ver_out);
      dump_json(dir / "verify.json", j);
      svol::RunManifest man;
      man.command = "verify";
      man.seed = ver_seed;
      man.threads = ver_threads;
      man.config["n"] = std::to_string(ver_n);
      man.config["n_mu4"] = std::to_string(ver_n_mu4);
      man.config["kmax"] = std::to_string(ver_kmax);
      man.outputs = {"verify.json"};
      svol::write_manifest(dir, man);
      std::cout << rows.size() << " checks, " << failures << " failures -> "
                << (dir / "verify.json").string() << "\n";
      return failures == 0 ? 0 : 2;
    }

    if (*fit) {
      const auto kind = svol::model_kind_from_string(fit_model);
      const auto mode = fit_mode == "prices" ? svol::IngestMode::Prices
                                             : svol::IngestMode::Returns;
      const auto series = svol::ingest(fit_input, mode);

      svol::FitConfig cfg;
      if (!fit_config_file.empty()) cfg = svol::parse_fit_config(fit_config_file, cfg);
      if (fit_iters >= 0) cfg.chain.total_iters = fit_iters;
      if (fit_burn >= 0) cfg.chain.burn_in = fit_burn;
      if (fit_thin >= 0) cfg.chain.thin = fit_thin;
      if (fit_adapt >= -1) cfg.chain.adapt_iters = fit_adapt;
      if (fit_seed_set) cfg.chain.seed = fit_seed;

      const auto dir = ensure_out_dir(fit_out);
      if (fit_chains <= 1) {
        const auto chain =
            svol::sample_posterior(series.returns, kind, cfg.priors, cfg.chain);
        write_fit_outputs(dir, chain, series.returns);
      } else {
        // Independent chains in parallel; draws concatenate, R-hat per scalar.
        std::vector<svol::PosteriorChain> chains(
            static_cast<std::size_t>(fit_chains));
        const int max_par = fit_threads > 0
                                ? fit_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
        std::atomic<int> next{0};
        auto worker = [&] {
          for (;;) {
            const int c = next.fetch_add(1);
            if (c >= fit_chains) break;
            auto chain_cfg = cfg.chain;
            chain_cfg.seed = svol::mix_seed(cfg.chain.seed, static_cast<std::uint64_t>(c));
            chains[static_cast<std::size_t>(c)] = svol::sample_posterior(
                series.returns, kind, cfg.priors, chain_cfg);
          }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < std::min(max_par, fit_chains); ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();

        svol::PosteriorChain merged = chains.front();
        for (std::size_t c = 1; c < chains.size(); ++c) {
          const auto& ch = chains[c];
          merged.theta_draws.insert(merged.theta_draws.end(), ch.theta_draws.begin(),
                                    ch.theta_draws.end());
          merged.h_draws.insert(merged.h_draws.end(), ch.h_draws.begin(),
                                ch.h_draws.end());
          merged.deviance_draws.insert(merged.deviance_draws.end(),
                                       ch.deviance_draws.begin(),
                                       ch.deviance_draws.end());
        }
        write_fit_outputs(dir, merged, series.returns);

        // Append per-parameter split R-hat to the summary.
        std::ifstream in(dir / "summary.json");
        json summary = json::parse(in);
        in.close();
        json rhat = json::object();
        auto add_rhat = [&](const std::string& name, auto&& get) {
          std::vector<std::vector<double>> per_chain;
          for (const auto& ch : chains) {
            std::vector<double> v;
            for (const auto& d : ch.theta_draws) v.push_back(get(d));
            per_chain.push_back(std::move(v));
          }
          rhat[name] = svol::split_rhat(per_chain);
        };
        add_rhat("alpha", [](const svol::ModelParams& d) { return d.alpha; });
        add_rhat("phi", [](const svol::ModelParams& d) { return d.phi; });
        add_rhat("sigma", [](const svol::ModelParams& d) { return d.sigma; });
        if (kind != svol::ModelKind::Classical) {
          add_rhat("rho", [](const svol::ModelParams& d) { return d.rho; });
        }
        summary["rhat"] = rhat;
        summary["chains"] = fit_chains;
        dump_json(dir / "summary.json", summary);
      }

      svol::RunManifest man;
      man.command = "fit";
      man.seed = cfg.chain.seed;
      man.threads = fit_threads;
      man.config = svol::config_snapshot(cfg);
      man.config["model"] = fit_model;
      man.config["mode"] = fit_mode;
      man.config["chains"] = std::to_string(fit_chains);
      man.inputs = {{fit_input, svol::fnv1a64_file(fit_input)}};
      man.outputs = {"chain.csv", "hmean.csv", "summary.json"};
      svol::write_manifest(dir, man);
      std::cout << "fit written to " << dir.string() << "\n";
      return 0;
    }

    if (*gof) {
      const auto mode = gof_mode == "prices" ? svol::IngestMode::Prices
                                             : svol::IngestMode::Returns;
      const auto series = svol::ingest(gof_input, mode);
      const auto art = load_fit(gof_fit_dir);
      const auto numbers = gof_from_artifacts(art, series.returns, gof_kmax);

      const auto dir = ensure_out_dir(gof_out);
      json j = gof_json(numbers);
      j["model"] = svol::to_string(art.kind);
      dump_json(dir / "gof.json", j);
      const std::string table =
          gof_table({svol::to_string(art.kind)}, {numbers}, gof_kmax);
      std::ofstream txt(dir / "gof.txt");
      txt << table;
      svol::RunManifest man;
      man.command = "gof";
      man.config["kmax"] = std::to_string(gof_kmax);
      man.inputs = {{gof_input, svol::fnv1a64_file(gof_input)}};
      man.outputs = {"gof.json", "gof.txt"};
      svol::write_manifest(dir, man);
      std::cout << table;
      return 0;
    }

    if (*rep) {
      const auto mode = rep_mode == "prices" ? svol::IngestMode::Prices
                                             : svol::IngestMode::Returns;
      const auto series = svol::ingest(rep_input, mode);

      std::vector<std::string> names;
      std::vector<GofNumbers> gofs;
      json per_model = json::object();
      for (const auto& [name, dir] :
           std::initializer_list<std::pair<const char*, const std::string*>>{
               {"svm0", &rep_svm0}, {"svmrho", &rep_svmrho}, {"svmrhomu", &rep_svmrhomu}}) {
        if (dir->empty()) continue;
        const auto art = load_fit(*dir);
        if (svol::to_string(art.kind) != name) {
          throw svol::Error(svol::Errc::ConfigError,
                            std::string("fit in ") + *dir + " is not " + name);
        }
        const auto numbers = gof_from_artifacts(art, series.returns, rep_kmax);
        per_model[name] = gof_json(numbers);
        names.emplace_back(name);
        gofs.push_back(numbers);
      }
      if (gofs.empty()) {
        throw svol::Error(svol::Errc::ConfigError, "no fit directories given");
      }

      const std::string table = gof_table(names, gofs, rep_kmax);
      const auto dir = ensure_out_dir(rep_out);
      std::ofstream txt(dir / "report.txt");
      txt << table;
      dump_json(dir / "report.json", per_model);
      svol::RunManifest man;
      man.command = "report";
      man.config["kmax"] = std::to_string(rep_kmax);
      man.inputs = {{rep_input, svol::fnv1a64_file(rep_input)}};
      man.outputs = {"report.txt", "report.json"};
      svol::write_manifest(dir, man);
      std::cout << table;
      return 0;
    }
  } catch (const svol::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
