#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "vfc/data_io.hpp"
#include "vfc/eval.hpp"
#include "vfc/synth.hpp"

using namespace vfc;
using namespace vfc::testfx;

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("VFC_CLI");
  REQUIRE_MESSAGE(env != nullptr, "VFC_CLI must point at the built binary");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vfc_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small dataset written through the synth command's own library path.
fs::path make_dataset(const std::string& name, const SynthParams& p) {
  const fs::path dir = temp_dir(name);
  write_synthetic(p, dir.string());
  return dir;
}

}  // namespace

TEST_CASE("training on identical days converges in one iteration") {
  SynthParams p = tiny_params(201, 1);
  const fs::path dir = make_dataset("identical", p);
  // Duplicate the single training day into three identical ones.
  const RunConfig cfg = load_config((dir / "config.json").string());
  const Grid grid = load_grid(cfg.grid_path);
  auto days = load_timeseries(cfg.series_path, cfg.actuals_path, grid, cfg.providers, p.horizon);
  std::vector<ScenarioDay> tripled;
  for (int d = 0; d < 3; ++d) {
    ScenarioDay copy = days.front();
    copy.id = d + 1;
    tripled.push_back(copy);
  }
  save_timeseries(tripled, grid, cfg.providers, cfg.series_path, cfg.actuals_path);
  RunConfig cfg2 = cfg;
  cfg2.train_days = {1, 2, 3};
  cfg2.test_days = {};
  cfg2.rho = 2000.0;
  save_config(cfg2, (dir / "config.json").string());

  const int rc = run("train --config " + (dir / "config.json").string() + " --out " +
                     (dir / "out").string());
  CHECK(rc == 0);
  REQUIRE(fs::exists(dir / "out" / "lambda.json"));
  REQUIRE(fs::exists(dir / "out" / "trace.csv"));
  std::ifstream trace(dir / "out" / "trace.csv");
  std::string line;
  int rows = 0;
  while (std::getline(trace, line)) ++rows;
  CHECK(rows == 3);  // header + initialization + one iteration
}

TEST_CASE("single-level trainer rejects long minimum uptimes with exit 1") {
  SynthParams p = tiny_params(202, 2);
  const fs::path dir = make_dataset("minup", p);
  Grid grid = load_grid((dir / "grid.json").string());
  grid.generators.front().min_up = 2;
  save_grid(grid, (dir / "grid.json").string());
  const int rc = run("train --config " + (dir / "config.json").string() + " --trainer stm --out " +
                     (dir / "out").string());
  CHECK(rc == 1);
  CHECK_FALSE(fs::exists(dir / "out" / "lambda.json"));
}

TEST_CASE("push-forward with a full active set matches the baseline trainer") {
  SynthParams p = tiny_params(203, 3);
  const fs::path dir = make_dataset("pfph", p);
  const std::string config = (dir / "config.json").string();
  REQUIRE(run("train --config " + config + " --rho 1500 --max-iter 15 --out " +
              (dir / "out_ph").string()) <= 2);
  REQUIRE(run("train --config " + config + " --trainer pfph --dprime 3 --rho 1500 --max-iter 15 --out " +
              (dir / "out_pf").string()) <= 2);
  const auto a = load_lambda_json((dir / "out_ph" / "lambda.json").string());
  const auto b = load_lambda_json((dir / "out_pf" / "lambda.json").string());
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-9);
  CHECK(read_file(dir / "out_ph" / "trace.csv") == read_file(dir / "out_pf" / "trace.csv"));
}

TEST_CASE("identical config and seed reproduce identical artifacts") {
  SynthParams p = tiny_params(204, 3);
  const fs::path dir = make_dataset("repro", p);
  const std::string config = (dir / "config.json").string();
  REQUIRE(run("train --config " + config + " --rho 1500 --max-iter 10 --out " +
              (dir / "r1").string()) <= 2);
  REQUIRE(run("train --config " + config + " --rho 1500 --max-iter 10 --out " +
              (dir / "r2").string()) <= 2);
  CHECK(read_file(dir / "r1" / "lambda.json") == read_file(dir / "r2" / "lambda.json"));
  CHECK(read_file(dir / "r1" / "trace.csv") == read_file(dir / "r2" / "trace.csv"));
}

TEST_CASE("evaluate writes a table-shaped report") {
  SynthParams p = tiny_params(205, 2);
  p.test_days = 2;
  const fs::path dir = make_dataset("eval", p);
  const std::string config = (dir / "config.json").string();
  CHECK(run("evaluate --config " + config + " --lambda 0.5,0.5 --label naive --out " +
            (dir / "out").string()) == 0);
  const std::string csv = read_file(dir / "out" / "report.csv");
  CHECK(csv.rfind("Method,lambda_1,lambda_2,Time_s,TST_star,Delta_a,Delta_b,Delta_c", 0) == 0);
  CHECK(csv.find("naive") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "report.md"));
  CHECK(fs::exists(dir / "out" / "per_day.csv"));
  // The naive average zeroes its own improvement column.
  const auto rows = read_report_csv((dir / "out" / "report.csv").string());
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0].delta[2]) <= 1e-9);

  // Off-simplex weights are rejected.
  CHECK(run("evaluate --config " + config + " --lambda 0.9,0.9 --out " + (dir / "bad").string()) == 1);
}

TEST_CASE("trained weights feed evaluation through the lambda file") {
  SynthParams p = tiny_params(206, 2);
  p.test_days = 2;
  const fs::path dir = make_dataset("pipeline", p);
  const std::string config = (dir / "config.json").string();
  REQUIRE(run("train --config " + config + " --trainer rmse --out " + (dir / "out").string()) == 0);
  CHECK(run("evaluate --config " + config + " --lambda-file " +
            (dir / "out" / "lambda.json").string() + " --label rmse --out " + (dir / "out").string()) == 0);
  const auto rows = read_report_csv((dir / "out" / "report.csv").string());
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].method == "rmse");
}

TEST_CASE("baseline command scores the reference combinations") {
  SynthParams p = tiny_params(207, 2);
  p.test_days = 2;
  const fs::path dir = make_dataset("baseline", p);
  CHECK(run("baseline --config " + (dir / "config.json").string() + " --out " +
            (dir / "out").string()) == 0);
  const auto rows = read_report_csv((dir / "out" / "report.csv").string());
  CHECK(rows.size() == 3);  // two single-provider rows plus the naive average
}

TEST_CASE("export writes parseable model files") {
  SynthParams p = tiny_params(208, 2);
  const fs::path dir = make_dataset("export", p);
  const std::string config = (dir / "config.json").string();
  CHECK(run("export --config " + config + " --target ph --day 1 --out " + (dir / "out").string()) == 0);
  const std::string lp = read_file(dir / "out" / "ph_day1.lp");
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Subject To") != std::string::npos);
  CHECK(lp.find("lambda_1") != std::string::npos);
  CHECK(run("export --config " + config + " --target stm --out " + (dir / "out").string()) == 0);
  CHECK(read_file(dir / "out" / "stm.lp").find("General") != std::string::npos);
}

TEST_CASE("synth subcommand reproduces files bit for bit") {
  const fs::path a = temp_dir("synth_a");
  const fs::path b = temp_dir("synth_b");
  const std::string args = " --seed 11 --nodes 2 --horizon 3 --days 2 --test-days 1";
  CHECK(run("synth --out " + a.string() + args) == 0);
  CHECK(run("synth --out " + b.string() + args) == 0);
  for (const char* name : {"grid.json", "series.csv", "actuals.csv", "config.json"})
    CHECK(read_file(a / name) == read_file(b / name));
}

TEST_CASE("missing config exits with code 1") {
  CHECK(run("train --config /nonexistent/config.json") == 1);
}
