#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vfc/data_io.hpp"
#include "vfc/errors.hpp"
#include "vfc/eval.hpp"
#include "vfc/kkt.hpp"
#include "vfc/lp_format.hpp"
#include "vfc/milp.hpp"
#include "vfc/ph.hpp"
#include "vfc/synth.hpp"
#include "vfc/uc_model.hpp"
#include "vfc/util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Overrides {
  std::optional<double> rho, eps;
  std::optional<int> dprime, parallelism, segments, max_iter;
  std::optional<std::string> variant, trainer, out_dir;
  std::optional<unsigned long> seed;
};

void apply_overrides(vfc::RunConfig& cfg, const Overrides& ov) {
  if (ov.rho) cfg.rho = *ov.rho;
  if (ov.eps) cfg.eps = *ov.eps;
  if (ov.dprime) cfg.dprime = *ov.dprime;
  if (ov.parallelism) cfg.parallelism = *ov.parallelism;
  if (ov.segments) cfg.segments = *ov.segments;
  if (ov.max_iter) cfg.max_iter = *ov.max_iter;
  if (ov.variant) cfg.variant = *ov.variant;
  if (ov.trainer) cfg.trainer = vfc::trainer_from_string(*ov.trainer);
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.seed) cfg.seed = *ov.seed;
  cfg.validate();
}

void print_banner(const vfc::RunConfig& cfg) {
  ordered_json j;
  j["trainer"] = vfc::to_string(cfg.trainer);
  j["variant"] = cfg.variant;
  j["rho"] = cfg.rho;
  j["eps"] = cfg.eps;
  j["dprime"] = cfg.dprime;
  j["segments"] = cfg.segments;
  j["max_iter"] = cfg.max_iter;
  j["parallelism"] = cfg.parallelism;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  std::cout << "resolved config: " << j.dump() << "\n";
}

vfc::UcVariant variant_of(const vfc::RunConfig& cfg) {
  return cfg.variant == "binary" ? vfc::UcVariant::Binary : vfc::UcVariant::Relaxed;
}

struct LoadedData {
  vfc::Grid grid;
  std::vector<vfc::ScenarioDay> train, test;
};

LoadedData load_all(const vfc::RunConfig& cfg) {
  LoadedData data;
  data.grid = vfc::load_grid(cfg.grid_path);
  std::vector<std::string> warnings;
  // Horizon comes from the data: scan for the max hour by loading with a
  // probe pass would complicate the loader, so the horizon is part of the
  // series itself; use 24 unless the config's series says otherwise via the
  // max hour of day rows. Simplest robust choice: read the file once to find
  // the max hour, then load strictly.
  int horizon = 0;
  {
    std::ifstream in(cfg.series_path);
    if (!in) throw vfc::DataError("cannot open " + cfg.series_path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::stringstream ls(line);
      std::string day, hour;
      std::getline(ls, day, ',');
      std::getline(ls, hour, ',');
      if (!hour.empty()) horizon = std::max(horizon, std::stoi(hour));
    }
  }
  if (horizon < 1) throw vfc::DataError(cfg.series_path + ": no data rows");
  auto days = vfc::load_timeseries(cfg.series_path, cfg.actuals_path, data.grid, cfg.providers,
                                   horizon, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  const auto in_list = [](const std::vector<int>& list, int id) {
    return std::find(list.begin(), list.end(), id) != list.end();
  };
  for (vfc::ScenarioDay& d : days) {
    if (cfg.train_days.empty() ? !in_list(cfg.test_days, d.id) : in_list(cfg.train_days, d.id))
      data.train.push_back(d);
    if (in_list(cfg.test_days, d.id)) data.test.push_back(d);
  }
  return data;
}

vfc::PHConfig ph_config(const vfc::RunConfig& cfg) {
  vfc::PHConfig pc;
  pc.rho = cfg.rho;
  pc.eps = cfg.eps;
  pc.variant = variant_of(cfg);
  pc.segments = cfg.segments;
  pc.max_iter = cfg.max_iter;
  pc.active_set = cfg.dprime;
  pc.parallelism = cfg.parallelism;
  return pc;
}

void write_run_meta(const std::string& out_dir, double seconds, long solves,
                    const std::vector<std::string>& warnings) {
  ordered_json j;
  j["train_seconds"] = seconds;
  j["subproblem_solves"] = solves;
  j["warnings"] = warnings;
  std::ofstream out(fs::path(out_dir) / "run_meta.json", std::ios::binary);
  out << j.dump(2) << "\n";
}

int cmd_train(const std::string& config_path, const Overrides& ov) {
  vfc::RunConfig cfg = vfc::load_config(config_path);
  apply_overrides(cfg, ov);
  print_banner(cfg);
  LoadedData data = load_all(cfg);
  if (data.train.empty()) throw vfc::DataError("no training days selected");
  fs::create_directories(cfg.out_dir);
  const std::string lambda_path = (fs::path(cfg.out_dir) / "lambda.json").string();

  switch (cfg.trainer) {
    case vfc::Trainer::Ph:
    case vfc::Trainer::Pfph: {
      const vfc::PHConfig pc = ph_config(cfg);
      const vfc::PHResult res = (cfg.trainer == vfc::Trainer::Ph)
                                    ? vfc::run_ph(data.grid, data.train, pc)
                                    : vfc::run_pfph(data.grid, data.train, pc);
      vfc::save_lambda_json(res.lambda.values(), cfg.providers, vfc::to_string(cfg.trainer),
                            res.converged, res.iterations, lambda_path);
      vfc::write_trace_csv(res.state.trace, (fs::path(cfg.out_dir) / "trace.csv").string());
      vfc::write_timing_csv(res.state.trace, (fs::path(cfg.out_dir) / "timing.csv").string());
      write_run_meta(cfg.out_dir, res.train_seconds, res.subproblem_solves, res.warnings);
      for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "trained lambda:";
      for (double l : res.lambda.values()) std::cout << " " << vfc::fmt_full(l);
      std::cout << (res.converged ? " (converged after " : " (not converged, ")
                << res.iterations << " iterations)\n";
      return res.converged ? 0 : 2;
    }
    case vfc::Trainer::Stm: {
      vfc::STMConfig sc;
      sc.big_m = cfg.big_m;
      const auto t0 = std::chrono::steady_clock::now();
      vfc::BuiltStm stm = vfc::build_stm(data.grid, data.train, sc);
      const vfc::Solution sol = vfc::solve_milp(stm.model, sc.solve);
      if (sol.status != vfc::SolveStatus::Optimal)
        throw vfc::SolverFailure("single-level solve returned '" +
                                 std::string(vfc::to_string(sol.status)) + "'");
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::vector<double> lambda;
      for (int v : stm.lambda_vars) lambda.push_back(sol.x[v]);
      const vfc::Weights w = vfc::Weights::renormalized(lambda);
      vfc::save_lambda_json(w.values(), cfg.providers, "stm", true, 1, lambda_path);
      const vfc::BigMReport rep = vfc::validate_bigm(stm, sol);
      std::vector<std::string> warnings;
      for (const vfc::BigMFlag& f : rep.flags)
        warnings.push_back("big-M audit: day " + std::to_string(f.day_id) + " " + f.kind + " '" +
                           f.row + "' at " + vfc::fmt_full(f.value) + " (limit " +
                           vfc::fmt_full(f.limit) + ")");
      write_run_meta(cfg.out_dir, seconds, 1, warnings);
      for (const std::string& wmsg : warnings) std::cerr << "warning: " << wmsg << "\n";
      std::cout << "trained lambda:";
      for (double l : w.values()) std::cout << " " << vfc::fmt_full(l);
      std::cout << " (single-level, " << sol.nodes << " nodes)\n";
      return 0;
    }
    case vfc::Trainer::Rmse: {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<double> rmse;
      for (int k = 0; k < static_cast<int>(cfg.providers.size()); ++k)
        rmse.push_back(vfc::rmse_per_provider(data.train, k));
      const vfc::Weights w = vfc::rmse_weights(rmse);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      vfc::save_lambda_json(w.values(), cfg.providers, "rmse", true, 0, lambda_path);
      write_run_meta(cfg.out_dir, seconds, 0, {});
      std::cout << "trained lambda:";
      for (double l : w.values()) std::cout << " " << vfc::fmt_full(l);
      std::cout << " (inverse RMSE)\n";
      return 0;
    }
    case vfc::Trainer::Fixed: {
      const vfc::Weights w = vfc::Weights::renormalized(cfg.fixed_lambda);
      vfc::save_lambda_json(w.values(), cfg.providers, "fixed", true, 0, lambda_path);
      write_run_meta(cfg.out_dir, 0.0, 0, {});
      return 0;
    }
  }
  return 1;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

int cmd_evaluate(const std::string& config_path, const Overrides& ov,
                 const std::string& lambda_file, const std::string& lambda_inline,
                 std::string label) {
  vfc::RunConfig cfg = vfc::load_config(config_path);
  apply_overrides(cfg, ov);
  print_banner(cfg);
  LoadedData data = load_all(cfg);
  const std::vector<vfc::ScenarioDay>& days = data.test.empty() ? data.train : data.test;
  if (days.empty()) throw vfc::DataError("no evaluation days selected");

  std::vector<double> lambda;
  if (!lambda_file.empty()) {
    lambda = vfc::load_lambda_json(lambda_file);
    if (label.empty()) label = "trained";
  } else if (!lambda_inline.empty()) {
    lambda = parse_double_list(lambda_inline);
    if (label.empty()) label = "fixed";
  } else {
    throw vfc::DataError("evaluate needs --lambda-file or --lambda");
  }
  const vfc::Weights w(lambda);  // rejects anything off the simplex

  double train_seconds = 0.0;
  if (!lambda_file.empty()) {
    const fs::path meta = fs::path(lambda_file).parent_path() / "run_meta.json";
    if (fs::exists(meta)) {
      std::ifstream in(meta);
      try {
        ordered_json j = ordered_json::parse(in);
        if (j.contains("train_seconds")) train_seconds = j["train_seconds"].get<double>();
      } catch (...) {
      }
    }
  }

  vfc::EvalReport rep = vfc::evaluate_tst(data.grid, w, days, variant_of(cfg), {}, cfg.parallelism);
  rep.method = label;
  rep.train_seconds = train_seconds;
  fs::create_directories(cfg.out_dir);
  vfc::write_report({rep}, (fs::path(cfg.out_dir) / "report.csv").string(),
                    (fs::path(cfg.out_dir) / "report.md").string());
  vfc::write_per_day_breakdown(rep, (fs::path(cfg.out_dir) / "per_day.csv").string());
  std::cout << "TST* = " << vfc::fmt_full(rep.tst) << " over " << days.size() << " day(s)\n";
  return 0;
}

int cmd_baseline(const std::string& config_path, const Overrides& ov) {
  vfc::RunConfig cfg = vfc::load_config(config_path);
  apply_overrides(cfg, ov);
  print_banner(cfg);
  LoadedData data = load_all(cfg);
  const std::vector<vfc::ScenarioDay>& days = data.test.empty() ? data.train : data.test;
  if (days.empty()) throw vfc::DataError("no evaluation days selected");
  const int K = static_cast<int>(cfg.providers.size());

  std::vector<vfc::EvalReport> rows;
  for (int k = 0; k < K; ++k) {
    vfc::EvalReport r = vfc::evaluate_tst(data.grid, vfc::Weights::unit(K, k), days,
                                          variant_of(cfg), {}, cfg.parallelism);
    r.method = "single_" + cfg.providers[k];
    rows.push_back(std::move(r));
  }
  vfc::EvalReport r = vfc::evaluate_tst(data.grid, vfc::Weights::uniform(K), days, variant_of(cfg),
                                        {}, cfg.parallelism);
  r.method = "naive_average";
  rows.push_back(std::move(r));

  fs::create_directories(cfg.out_dir);
  vfc::write_report(rows, (fs::path(cfg.out_dir) / "report.csv").string(),
                    (fs::path(cfg.out_dir) / "report.md").string());
  std::cout << "wrote " << rows.size() << " baseline rows\n";
  return 0;
}

int cmd_export(const std::string& config_path, const Overrides& ov, const std::string& target,
               int day_id, const std::string& mu_str, const std::string& bar_str) {
  vfc::RunConfig cfg = vfc::load_config(config_path);
  apply_overrides(cfg, ov);
  print_banner(cfg);
  LoadedData data = load_all(cfg);
  fs::create_directories(cfg.out_dir);
  const int K = static_cast<int>(cfg.providers.size());

  if (target == "stm") {
    vfc::STMConfig sc;
    sc.big_m = cfg.big_m;
    vfc::BuiltStm stm = vfc::build_stm(data.grid, data.train, sc);
    const std::string path = (fs::path(cfg.out_dir) / "stm.lp").string();
    vfc::write_lp_file(stm.model, path);
    std::cout << "wrote " << path << "\n";
    return 0;
  }
  if (target == "ph") {
    std::vector<double> mu(K, 0.0), bar(K, 1.0 / K);
    if (!mu_str.empty()) mu = parse_double_list(mu_str);
    if (!bar_str.empty()) bar = parse_double_list(bar_str);
    const vfc::PHConfig pc = ph_config(cfg);
    bool found = false;
    for (const vfc::ScenarioDay& d : data.train) {
      if (day_id != 0 && d.id != day_id) continue;
      found = true;
      vfc::PHSubproblem sp = vfc::build_ph_subproblem(data.grid, d, mu, cfg.rho, bar, pc);
      const std::string path =
          (fs::path(cfg.out_dir) / ("ph_day" + std::to_string(d.id) + ".lp")).string();
      vfc::write_lp_file(sp.model, path);
      std::cout << "wrote " << path << "\n";
    }
    if (!found) throw vfc::DataError("day " + std::to_string(day_id) + " not in the training set");
    return 0;
  }
  throw vfc::DataError("export target must be 'ph' or 'stm'");
}

int cmd_synth(const vfc::SynthParams& params, const std::string& out_dir) {
  vfc::write_synthetic(params, out_dir);
  std::cout << "wrote synthetic dataset to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value-oriented forecast combination trainer for two-stage unit commitment"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration JSON")->required();
    sub->add_option_function<double>("--rho", [&](double v) { ov.rho = v; }, "penalty parameter");
    sub->add_option_function<double>("--eps", [&](double v) { ov.eps = v; }, "convergence threshold");
    sub->add_option_function<int>("--dprime", [&](int v) { ov.dprime = v; }, "push-forward active-set size");
    sub->add_option_function<std::string>("--variant", [&](std::string v) { ov.variant = v; },
                                          "commitment variant: binary|relaxed");
    sub->add_option_function<std::string>("--trainer", [&](std::string v) { ov.trainer = v; },
                                          "trainer: ph|pfph|stm|rmse|fixed");
    sub->add_option_function<std::string>("--out", [&](std::string v) { ov.out_dir = v; }, "output directory");
    sub->add_option_function<unsigned long>("--seed", [&](unsigned long v) { ov.seed = v; }, "random seed");
    sub->add_option_function<int>("--parallelism", [&](int v) { ov.parallelism = v; }, "worker threads");
    sub->add_option_function<int>("--segments", [&](int v) { ov.segments = v; }, "penalty segments");
    sub->add_option_function<int>("--max-iter", [&](int v) { ov.max_iter = v; }, "iteration cap");
  };

  CLI::App* train = app.add_subcommand("train", "train combination weights");
  add_common(train);

  CLI::App* evaluate = app.add_subcommand("evaluate", "score weights by realized two-stage cost");
  add_common(evaluate);
  std::string lambda_file, lambda_inline, label;
  evaluate->add_option("--lambda-file", lambda_file, "lambda.json from a training run");
  evaluate->add_option("--lambda", lambda_inline, "inline weights, e.g. 0.5,0.5");
  evaluate->add_option("--label", label, "method name for the report row");

  CLI::App* baseline = app.add_subcommand("baseline", "score the reference combinations");
  add_common(baseline);

  CLI::App* exp = app.add_subcommand("export", "write LP files for external solvers");
  add_common(exp);
  std::string target = "stm", mu_str, bar_str;
  int day_id = 0;
  exp->add_option("--target", target, "ph|stm");
  exp->add_option("--day", day_id, "day id for ph subproblem export (0 = all)");
  exp->add_option("--mu", mu_str, "multipliers, comma separated");
  exp->add_option("--lambda-bar", bar_str, "consensus average, comma separated");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  vfc::SynthParams sp;
  std::string synth_out = "synth_out";
  std::string bias_str, noise_str;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", sp.seed, "random seed");
  synth->add_option("--nodes", sp.nodes, "number of nodes");
  synth->add_option("--horizon", sp.horizon, "hours per day");
  synth->add_option("--days", sp.train_days, "training days");
  synth->add_option("--test-days", sp.test_days, "testing days");
  synth->add_option("--providers", sp.providers, "forecast providers");
  synth->add_option("--bias", bias_str, "per-provider bias, comma separated");
  synth->add_option("--noise", noise_str, "per-provider noise stddev, comma separated");
  synth->add_option("--base-load", sp.base_load, "mean nodal load (MW)");
  synth->add_option("--wind-share", sp.wind_share, "wind level relative to base load");
  synth->add_option("--shed-cost", sp.shed_cost, "shed cost ($/MWh)");
  synth->add_option("--curtail-cost", sp.curtail_cost, "curtailment cost ($/MWh)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, ov);
    if (evaluate->parsed()) return cmd_evaluate(config_path, ov, lambda_file, lambda_inline, label);
    if (baseline->parsed()) return cmd_baseline(config_path, ov);
    if (exp->parsed()) return cmd_export(config_path, ov, target, day_id, mu_str, bar_str);
    if (synth->parsed()) {
      if (!bias_str.empty()) sp.bias = parse_double_list(bias_str);
      if (!noise_str.empty()) sp.noise = parse_double_list(noise_str);
      return cmd_synth(sp, synth_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
