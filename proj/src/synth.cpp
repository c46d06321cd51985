#include "vfc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "vfc/data_io.hpp"
#include "vfc/errors.hpp"
#include "vfc/util.hpp"

namespace vfc {

void SynthParams::validate() const {
  if (nodes < 1) throw DataError("synth: nodes must be >= 1");
  if (horizon < 1) throw DataError("synth: horizon must be >= 1");
  if (train_days < 1) throw DataError("synth: train_days must be >= 1");
  if (test_days < 0) throw DataError("synth: test_days must be >= 0");
  if (providers < 1) throw DataError("synth: providers must be >= 1");
  if (base_load <= 0.0) throw DataError("synth: base_load must be > 0");
  if (wind_share < 0.0 || wind_share > 0.3)
    throw DataError("synth: wind_share must lie in [0, 0.3] to keep instances well-posed");
  if (!bias.empty() && static_cast<int>(bias.size()) != providers)
    throw DataError("synth: bias needs one entry per provider");
  if (!noise.empty() && static_cast<int>(noise.size()) != providers)
    throw DataError("synth: noise needs one entry per provider");
  for (double n : noise)
    if (n < 0.0) throw DataError("synth: negative noise");
  if (shed_cost < 0.0 || curtail_cost < 0.0) throw DataError("synth: negative cost");
  if (line_capacity_factor <= 0.0) throw DataError("synth: line_capacity_factor must be > 0");
}

std::vector<double> SynthParams::effective_bias() const {
  if (!bias.empty()) return bias;
  std::vector<double> b(providers, 0.0);
  if (providers >= 1) b[0] = -2.0;
  for (int k = 1; k < providers; ++k) b[k] = 12.0 / k;
  return b;
}

std::vector<double> SynthParams::effective_noise() const {
  if (!noise.empty()) return noise;
  std::vector<double> n(providers, 3.0);
  if (providers >= 1) n[0] = 9.0;
  return n;
}

namespace {

Grid make_grid(const SynthParams& p) {
  Grid grid;
  const int N = p.nodes;
  const int G = std::max(1, (2 * N + 2) / 3);  // 2 generators on the 3-node default
  for (int i = 0; i < N; ++i) {
    NodeParams node;
    node.id = "n" + std::to_string(i + 1);
    node.shed_cost = p.shed_cost;
    node.curtail_cost = p.curtail_cost;
    node.wind_capacity_mw = (p.wind_share > 0.0 && i < G) ? p.wind_share * p.base_load : 0.0;
    grid.nodes.push_back(std::move(node));
  }
  grid.reference = "n1";
  for (int i = 0; i + 1 < N; ++i) {
    LineParams line;
    line.from = "n" + std::to_string(i + 1);
    line.to = "n" + std::to_string(i + 2);
    line.susceptance = 10.0;
    line.capacity = p.line_capacity_factor * p.base_load;
    grid.lines.push_back(std::move(line));
  }
  if (N >= 3) {
    LineParams line;
    line.from = "n" + std::to_string(N);
    line.to = "n1";
    line.susceptance = 10.0;
    line.capacity = p.line_capacity_factor * p.base_load;
    grid.lines.push_back(std::move(line));
  }
  // Flexible fleet sized to cover the system peak with slack: any committed
  // pattern can track realized swings, which keeps both stages feasible for
  // every simplex weight vector.
  const double fleet = 1.7 * N * p.base_load;
  for (int g = 0; g < G; ++g) {
    GeneratorParams gen;
    gen.id = "g" + std::to_string(g + 1);
    gen.node = "n" + std::to_string(g + 1);
    gen.cost = 20.0 + 18.0 * g;
    gen.startup_cost = 350.0 + 150.0 * g;
    gen.shutdown_cost = 80.0;
    gen.up_cost = gen.cost * 2.2;
    gen.down_cost = gen.cost * 0.25;
    gen.p_min = 0.0;
    gen.p_max = fleet / G;
    gen.ramp = gen.p_max;
    gen.startup_ramp = gen.p_max;
    gen.min_up = 1;
    gen.min_down = 1;
    gen.initial_status = 0;
    grid.generators.push_back(std::move(gen));
  }
  grid.finalize();
  return grid;
}

ScenarioDay make_day(const SynthParams& p, const Grid& grid, int day_id, Rng& rng) {
  const int N = p.nodes;
  const int T = p.horizon;
  const int K = p.providers;
  const std::vector<double> bias = p.effective_bias();
  const std::vector<double> noise = p.effective_noise();

  ScenarioDay day;
  day.id = day_id;
  day.horizon = T;
  day.net_load = Series(N, T);
  day.wind = Series(N, T);
  day.fc_net_load.assign(K, Series(N, T));
  day.fc_wind.assign(K, Series(N, T));

  const double day_factor = 1.0 + 0.08 * std::sin(2.0 * 3.14159265358979 * day_id / 7.0) +
                            0.04 * rng.normal();

  for (int i = 0; i < N; ++i) {
    const double node_scale = 0.8 + 0.4 * static_cast<double>(i) / std::max(1, N - 1);
    for (int t = 0; t < T; ++t) {
      const double shape = 0.85 + 0.35 * std::sin(3.14159265358979 * (t + 0.5) / T);
      const double true_load =
          p.base_load * node_scale * shape * day_factor * (1.0 + 0.03 * rng.normal());
      double wind_pot = 0.0;
      if (grid.nodes[i].wind_capacity_mw > 0.0) {
        const double gust = 0.35 + 0.55 * rng.uniform();
        wind_pot = grid.nodes[i].wind_capacity_mw * gust *
                   (0.7 + 0.3 * std::sin(3.14159265358979 * (t + 1.5) / T));
      }
      // Keep the instance inside the feasible envelope: load clears twice the
      // wind level so shed caps stay nonnegative for every combination.
      const double load = std::max(true_load, 2.0 * wind_pot + 1.0);
      day.net_load.at(i, t) = load - wind_pot;
      day.wind.at(i, t) = wind_pot;
      for (int k = 0; k < K; ++k) {
        const double err = bias[k] + noise[k] * rng.normal();
        const double fc_load = std::max(load + err, 2.0 * wind_pot);
        day.fc_net_load[k].at(i, t) = fc_load - wind_pot;
        day.fc_wind[k].at(i, t) = wind_pot;
      }
    }
  }
  return day;
}

}  // namespace

SynthData make_synthetic(const SynthParams& params) {
  params.validate();
  SynthData out;
  out.grid = make_grid(params);
  Rng rng(params.seed);
  for (int d = 1; d <= params.train_days; ++d)
    out.train.push_back(make_day(params, out.grid, d, rng));
  for (int d = 1; d <= params.test_days; ++d)
    out.test.push_back(make_day(params, out.grid, params.train_days + d, rng));
  return out;
}

void write_synthetic(const SynthParams& params, const std::string& dir) {
  namespace fs = std::filesystem;
  const SynthData data = make_synthetic(params);
  fs::create_directories(dir);

  std::vector<std::string> providers;
  for (int k = 0; k < params.providers; ++k) providers.push_back("p" + std::to_string(k + 1));

  save_grid(data.grid, (fs::path(dir) / "grid.json").string());
  std::vector<ScenarioDay> all = data.train;
  all.insert(all.end(), data.test.begin(), data.test.end());
  save_timeseries(all, data.grid, providers, (fs::path(dir) / "series.csv").string(),
                  (fs::path(dir) / "actuals.csv").string());

  RunConfig cfg;
  cfg.grid_path = "grid.json";
  cfg.series_path = "series.csv";
  cfg.actuals_path = "actuals.csv";
  cfg.providers = providers;
  cfg.trainer = Trainer::Ph;
  for (int d = 1; d <= params.train_days; ++d) cfg.train_days.push_back(d);
  for (int d = 1; d <= params.test_days; ++d) cfg.test_days.push_back(params.train_days + d);
  cfg.out_dir = "out";
  cfg.seed = params.seed;
  save_config(cfg, (fs::path(dir) / "config.json").string());
}

}  // namespace vfc
