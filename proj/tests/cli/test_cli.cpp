#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "svol/csv.hpp"
#include "svol/simulate.hpp"

namespace fs = std::filesystem;
using namespace svol;
using nlohmann::json;

namespace {

const std::string kCli = SVOL_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::path("cli_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Errc code_of_ingest(const fs::path& p, IngestMode mode) {
  try {
    ingest(p, mode);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ConfigError;
}

std::vector<double> tiny_series(std::size_t n, std::uint64_t seed) {
  ModelParams p;
  p.alpha = -8;
  p.phi = 0.9;
  p.sigma = 0.3;
  p.kind = ModelKind::Classical;
  SimConfig cfg;
  cfg.horizon = static_cast<std::int64_t>(n);
  cfg.seed = seed;
  return simulate_path(p, cfg).returns;
}

void write_returns_csv(const fs::path& p, const std::vector<double>& r) {
  CsvTable t;
  t.header = {"t", "r"};
  for (std::size_t i = 0; i < r.size(); ++i) {
    t.rows.push_back({std::to_string(i + 1), format_double(r[i])});
  }
  write_csv(p, t);
}

}  // namespace

TEST_CASE("ingest prices: log returns from consecutive prices") {
  const auto dir = fresh_dir("ingest");
  write_file(dir / "flat.csv", "date,price\n2020-01-01,100\n2020-01-02,100\n");
  auto flat = ingest(dir / "flat.csv", IngestMode::Prices);
  REQUIRE(flat.returns.size() == 1);
  CHECK(flat.returns[0] == 0.0);

  write_file(dir / "up.csv", "date,price\n2020-01-01,100\n2020-01-02,110\n");
  auto up = ingest(dir / "up.csv", IngestMode::Prices);
  CHECK(up.returns[0] == doctest::Approx(0.09531017980432486).epsilon(1e-15));

  // Non-trading-day gaps are allowed.
  write_file(dir / "gap.csv", "date,price\n2020-01-01,100\n2020-01-05,110\n2020-02-01,105\n");
  CHECK(ingest(dir / "gap.csv", IngestMode::Prices).returns.size() == 2);
}

TEST_CASE("ingest rejects bad input with the right codes") {
  const auto dir = fresh_dir("ingest_err");

  write_file(dir / "neg.csv", "date,price\n2020-01-01,100\n2020-01-02,-5\n");
  try {
    ingest(dir / "neg.csv", IngestMode::Prices);
    FAIL("expected NonPositivePrice");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonPositivePrice);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  write_file(dir / "dup.csv", "date,price\n2020-01-02,100\n2020-01-02,101\n");
  CHECK(code_of_ingest(dir / "dup.csv", IngestMode::Prices) == Errc::NonMonotoneDates);

  write_file(dir / "back.csv", "date,return\n2020-01-02,0.1\n2020-01-01,0.1\n");
  CHECK(code_of_ingest(dir / "back.csv", IngestMode::Returns) == Errc::NonMonotoneDates);

  write_file(dir / "head.csv", "day,price\n2020-01-01,100\n");
  CHECK(code_of_ingest(dir / "head.csv", IngestMode::Prices) == Errc::ParseError);

  write_file(dir / "text.csv", "date,return\n2020-01-01,abc\n");
  CHECK(code_of_ingest(dir / "text.csv", IngestMode::Returns) == Errc::ParseError);

  write_file(dir / "short.csv", "date,price\n2020-01-01,100\n");
  CHECK(code_of_ingest(dir / "short.csv", IngestMode::Prices) == Errc::EmptyInput);

  write_file(dir / "empty.csv", "");
  CHECK(code_of_ingest(dir / "empty.csv", IngestMode::Returns) == Errc::EmptyInput);

  write_file(dir / "ragged.csv", "date,return\n2020-01-01,0.1,9\n");
  CHECK(code_of_ingest(dir / "ragged.csv", IngestMode::Returns) == Errc::ParseError);
}

TEST_CASE("simulate output re-ingests to the identical return vector") {
  const auto dir = fresh_dir("roundtrip");
  REQUIRE(run_cli("simulate --model svmrhomu --alpha -7.88 --phi 0.96 --sigma 0.18 "
                  "--rho 0.105 --horizon 200 --seed 5 --out " + dir.string()) == 0);

  const auto back = ingest(dir / "path.csv", IngestMode::Returns);

  SimConfig cfg;
  cfg.horizon = 200;
  cfg.seed = 5;
  ModelParams p;
  p.alpha = -7.88;
  p.phi = 0.96;
  p.sigma = 0.18;
  p.rho = 0.105;
  p.kind = ModelKind::MeanCorrected;
  const auto direct = simulate_path(p, cfg);

  REQUIRE(back.returns.size() == direct.returns.size());
  for (std::size_t i = 0; i < back.returns.size(); ++i) {
    CHECK(back.returns[i] == direct.returns[i]);
  }
}

TEST_CASE("seeded commands are bit-identical across invocations") {
  const auto a = fresh_dir("repro_a");
  const auto b = fresh_dir("repro_b");
  const std::string sim_args =
      "simulate --model svmrho --alpha -1 --phi 0.9 --sigma 0.3 --rho 0.4 "
      "--horizon 300 --seed 99 --out ";
  REQUIRE(run_cli(sim_args + a.string()) == 0);
  REQUIRE(run_cli(sim_args + b.string()) == 0);
  CHECK(slurp(a / "path.csv") == slurp(b / "path.csv"));

  const auto va = fresh_dir("repro_va");
  const auto vb = fresh_dir("repro_vb");
  const std::string ver_args =
      "verify --single --alpha -1 --phi 0.5 --sigma 0.5 --rho 0.3 --n 20000 "
      "--n-mu4 20000 --seed 3 --out ";
  REQUIRE(run_cli(ver_args + va.string()) == 0);
  REQUIRE(run_cli(ver_args + vb.string()) == 0);
  CHECK(slurp(va / "verify.json") == slurp(vb / "verify.json"));
}

TEST_CASE("fit: chain arithmetic, reproducibility, and artifacts") {
  const auto dir = fresh_dir("fit");
  write_returns_csv(dir / "data.csv", tiny_series(200, 12));

  const std::string fit_args = "fit --input " + (dir / "data.csv").string() +
                               " --model svm0 --iters 1800 --burn 300 --thin 5 "
                               "--seed 21 --out ";
  const auto f1 = fresh_dir("fit_one");
  const auto f2 = fresh_dir("fit_two");
  REQUIRE(run_cli(fit_args + f1.string()) == 0);
  REQUIRE(run_cli(fit_args + f2.string()) == 0);

  const json summary = json::parse(slurp(f1 / "summary.json"));
  CHECK(summary.at("retained_draws").get<int>() == 300);
  CHECK(summary.at("model").get<std::string>() == "svm0");

  CHECK(slurp(f1 / "chain.csv") == slurp(f2 / "chain.csv"));
  CHECK(slurp(f1 / "summary.json") == slurp(f2 / "summary.json"));
  CHECK(slurp(f1 / "hmean.csv") == slurp(f2 / "hmean.csv"));

  const auto chain = read_csv(f1 / "chain.csv");
  REQUIRE(chain.header.size() == 7);
  CHECK(chain.header[0] == "iter");
  CHECK(chain.header[5] == "mu");
  CHECK(chain.rows.size() == 300);
  // First retained iteration is burn_in + thin.
  CHECK(chain.rows[0][0] == "305");
  CHECK(fs::exists(f1 / "manifest.json"));
}

TEST_CASE("config file settings apply beneath CLI flag overrides") {
  const auto dir = fresh_dir("cfg");
  write_returns_csv(dir / "data.csv", tiny_series(120, 13));
  write_file(dir / "svol.cfg",
             "# test config\n"
             "chain.total_iters = 900\n"
             "chain.burn_in = 100\n"
             "chain.thin = 4\n"
             "prior.alpha.var = 16\n");

  const auto out = fresh_dir("cfg_out");
  REQUIRE(run_cli("fit --input " + (dir / "data.csv").string() + " --config " +
                  (dir / "svol.cfg").string() + " --model svm0 --thin 8 --seed 2 --out " +
                  out.string()) == 0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("chain").at("total_iters").get<int>() == 900);  // from file
  CHECK(summary.at("chain").at("thin").get<int>() == 8);           // flag wins
  CHECK(summary.at("retained_draws").get<int>() == 100);           // (900-100)/8

  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("config").at("prior.alpha.var").get<std::string>() == "16");

  // Unknown keys are rejected.
  write_file(dir / "bad.cfg", "chain.totall_iters = 900\n");
  CHECK(run_cli("fit --input " + (dir / "data.csv").string() + " --config " +
                (dir / "bad.cfg").string() + " --out " + out.string()) != 0);
}

TEST_CASE("gof and report run end to end over three fits") {
  const auto dir = fresh_dir("pipeline");
  write_returns_csv(dir / "data.csv", tiny_series(250, 14));
  const std::string common = " --input " + (dir / "data.csv").string() +
                             " --iters 2000 --burn 400 --thin 8 --seed 6 --out ";

  REQUIRE(run_cli("fit --model svm0" + common + (dir / "f0").string()) == 0);
  REQUIRE(run_cli("fit --model svmrho" + common + (dir / "fr").string()) == 0);
  REQUIRE(run_cli("fit --model svmrhomu" + common + (dir / "fm").string()) == 0);

  REQUIRE(run_cli("gof --input " + (dir / "data.csv").string() + " --fit " +
                  (dir / "fm").string() + " --kmax 5 --out " + (dir / "gof").string()) == 0);
  const json g = json::parse(slurp(dir / "gof" / "gof.json"));
  CHECK(g.at("model").get<std::string>() == "svmrhomu");
  CHECK(g.at("mspe").get<double>() >= 0.0);
  CHECK(g.at("descriptive").at("variance").get<double>() > 0.0);
  CHECK(g.at("empirical_leadlag").size() == 11);

  REQUIRE(run_cli("report --input " + (dir / "data.csv").string() +
                  " --fit-svm0 " + (dir / "f0").string() +
                  " --fit-svmrho " + (dir / "fr").string() +
                  " --fit-svmrhomu " + (dir / "fm").string() +
                  " --kmax 5 --out " + (dir / "rep").string()) == 0);
  const std::string table = slurp(dir / "rep" / "report.txt");
  for (const char* row : {"Mean", "Variance", "Skewness", "Kurtosis", "corr(r,h)",
                          "Deviance", "MSPE", "svm0", "svmrho", "svmrhomu"}) {
    CHECK(table.find(row) != std::string::npos);
  }
  const json rep = json::parse(slurp(dir / "rep" / "report.json"));
  CHECK(rep.size() == 3);

  // Pointing a model flag at the wrong fit directory must fail loudly.
  CHECK(run_cli("report --input " + (dir / "data.csv").string() + " --fit-svm0 " +
                (dir / "fm").string() + " --out " + (dir / "bad").string()) != 0);
}

TEST_CASE("multi-chain fits report split R-hat") {
  const auto dir = fresh_dir("multichain");
  write_returns_csv(dir / "data.csv", tiny_series(150, 15));
  REQUIRE(run_cli("fit --input " + (dir / "data.csv").string() +
                  " --model svm0 --iters 2000 --burn 400 --thin 8 --seed 31 "
                  "--chains 2 --threads 2 --out " + (dir / "out").string()) == 0);
  const json summary = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(summary.at("chains").get<int>() == 2);
  CHECK(summary.at("retained_draws").get<int>() == 400);  // 2 x 200
  for (const char* name : {"alpha", "phi", "sigma"}) {
    const double rhat = summary.at("rhat").at(name).get<double>();
    CHECK(rhat > 0.8);
    CHECK(rhat < 1.6);
  }
}

TEST_CASE("unknown flags and missing inputs exit nonzero") {
  CHECK(run_cli("simulate --no-such-flag") != 0);
  CHECK(run_cli("fit --input does_not_exist.csv --out cli_tmp/none") != 0);
  CHECK(run_cli("moments --model bogus") != 0);
}
