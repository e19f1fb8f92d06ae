#include "svol/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "svol/csv.hpp"

namespace svol {

namespace {

double to_double(const std::string& v, const std::string& key) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error(Errc::ConfigError, "bad numeric value for " + key + ": '" + v + "'");
  }
  return x;
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  std::int64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error(Errc::ConfigError, "bad integer value for " + key + ": '" + v + "'");
  }
  return x;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return {};
  return s.substr(a, b - a + 1);
}

}  // namespace

FitConfig parse_fit_config(const std::filesystem::path& file, FitConfig base) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ConfigError, "cannot open config " + file.string());

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << file.string() << ":" << line_no << ": expected 'key = value'";
      throw Error(Errc::ConfigError, os.str());
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));

    if (key == "prior.alpha.mean") base.priors.alpha_mean = to_double(value, key);
    else if (key == "prior.alpha.var") base.priors.alpha_var = to_double(value, key);
    else if (key == "prior.phi.beta.a") base.priors.phi_a = to_double(value, key);
    else if (key == "prior.phi.beta.b") base.priors.phi_b = to_double(value, key);
    else if (key == "prior.sigma_sq.shape") base.priors.sigma_sq_shape = to_double(value, key);
    else if (key == "prior.sigma_sq.scale") base.priors.sigma_sq_scale = to_double(value, key);
    else if (key == "chain.total_iters") base.chain.total_iters = to_int(value, key);
    else if (key == "chain.burn_in") base.chain.burn_in = to_int(value, key);
    else if (key == "chain.thin") base.chain.thin = to_int(value, key);
    else if (key == "chain.adapt_iters") base.chain.adapt_iters = to_int(value, key);
    else if (key == "chain.seed") base.chain.seed = static_cast<std::uint64_t>(to_int(value, key));
    else {
      std::ostringstream os;
      os << file.string() << ":" << line_no << ": unknown key '" << key << "'";
      throw Error(Errc::ConfigError, os.str());
    }
  }
  return base;
}

std::map<std::string, std::string> config_snapshot(const FitConfig& cfg) {
  std::map<std::string, std::string> m;
  m["prior.alpha.mean"] = format_double(cfg.priors.alpha_mean);
  m["prior.alpha.var"] = format_double(cfg.priors.alpha_var);
  m["prior.phi.beta.a"] = format_double(cfg.priors.phi_a);
  m["prior.phi.beta.b"] = format_double(cfg.priors.phi_b);
  m["prior.sigma_sq.shape"] = format_double(cfg.priors.sigma_sq_shape);
  m["prior.sigma_sq.scale"] = format_double(cfg.priors.sigma_sq_scale);
  m["chain.total_iters"] = std::to_string(cfg.chain.total_iters);
  m["chain.burn_in"] = std::to_string(cfg.chain.burn_in);
  m["chain.thin"] = std::to_string(cfg.chain.thin);
  m["chain.adapt_iters"] = std::to_string(cfg.chain.adapt_window());
  m["chain.seed"] = std::to_string(cfg.chain.seed);
  return m;
}

}  // namespace svol
