#include "vfc/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vfc/errors.hpp"
#include "vfc/util.hpp"

namespace vfc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

double num_field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw DataError(ctx + ": missing field '" + key + "'");
  if (!j[key].is_number()) throw DataError(ctx + ": field '" + key + "' must be numeric");
  return j[key].get<double>();
}

double num_field_or(const json& j, const std::string& key, double fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw DataError(ctx + ": field '" + key + "' must be numeric");
  return j[key].get<double>();
}

std::string str_field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw DataError(ctx + ": missing field '" + key + "'");
  if (!j[key].is_string()) throw DataError(ctx + ": field '" + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_num(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DataError(ctx + ": trailing characters in number '" + s + "'");
    if (std::isnan(v)) throw DataError(ctx + ": NaN value");
    return v;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception&) {
    throw DataError(ctx + ": cannot parse number '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw DataError(ctx + ": trailing characters in integer '" + s + "'");
    return v;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception&) {
    throw DataError(ctx + ": cannot parse integer '" + s + "'");
  }
}

}  // namespace

void PowerCurve::validate() const {
  if (knots.size() < 2) throw DataError("power curve: needs at least two knots");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (knots[k].second < 0.0 || knots[k].second > 1.0)
      throw DataError("power curve: fraction outside [0, 1] at knot " + std::to_string(k));
    if (k > 0 && knots[k].first <= knots[k - 1].first)
      throw DataError("power curve: speeds must be strictly increasing");
  }
}

double wind_speed_to_power(double speed, const PowerCurve& curve, double capacity_mw) {
  curve.validate();
  if (speed < 0.0) throw DataError("power curve: negative wind speed");
  if (speed < curve.knots.front().first || speed > curve.knots.back().first) return 0.0;
  for (std::size_t k = 0; k + 1 < curve.knots.size(); ++k) {
    const auto [s0, f0] = curve.knots[k];
    const auto [s1, f1] = curve.knots[k + 1];
    if (speed <= s1) {
      const double f = f0 + (f1 - f0) * (speed - s0) / (s1 - s0);
      return std::clamp(f, 0.0, 1.0) * capacity_mw;
    }
  }
  return std::clamp(curve.knots.back().second, 0.0, 1.0) * capacity_mw;
}

std::vector<double> wind_speed_to_power(const std::vector<double>& speeds,
                                        const PowerCurve& curve, double capacity_mw) {
  std::vector<double> out;
  out.reserve(speeds.size());
  for (double s : speeds) out.push_back(wind_speed_to_power(s, curve, capacity_mw));
  return out;
}

const char* to_string(Trainer t) {
  switch (t) {
    case Trainer::Ph: return "ph";
    case Trainer::Pfph: return "pfph";
    case Trainer::Stm: return "stm";
    case Trainer::Rmse: return "rmse";
    case Trainer::Fixed: return "fixed";
  }
  return "?";
}

Trainer trainer_from_string(const std::string& s) {
  if (s == "ph") return Trainer::Ph;
  if (s == "pfph") return Trainer::Pfph;
  if (s == "stm") return Trainer::Stm;
  if (s == "rmse") return Trainer::Rmse;
  if (s == "fixed") return Trainer::Fixed;
  throw DataError("unknown trainer '" + s + "' (valid: ph, pfph, stm, rmse, fixed)");
}

void RunConfig::validate() const {
  if (providers.empty()) throw DataError("config: provider list is empty");
  if (!(rho > 0.0)) throw DataError("config: rho must be > 0");
  if (!(eps > 0.0)) throw DataError("config: eps must be > 0");
  if (segments < 1) throw DataError("config: segments must be >= 1");
  if (max_iter < 1) throw DataError("config: max_iter must be >= 1");
  if (parallelism < 1) throw DataError("config: parallelism must be >= 1");
  if (dprime < 0) throw DataError("config: dprime must be >= 0");
  if (variant != "binary" && variant != "relaxed")
    throw DataError("config: variant must be 'binary' or 'relaxed'");
  if (trainer == Trainer::Fixed && fixed_lambda.size() != providers.size())
    throw DataError("config: trainer 'fixed' needs fixed_lambda with one weight per provider");
  std::set<int> train(train_days.begin(), train_days.end());
  for (int d : test_days)
    if (train.count(d))
      throw DataError("config: day " + std::to_string(d) + " appears in both train and test lists");
}

Grid load_grid(const std::string& path) {
  const json j = parse_json_file(path);
  Grid grid;
  try {
    grid.base_mva = num_field_or(j, "base_mva", 100.0, path);
    grid.reference = str_field(j, "reference_node", path);
    if (!j.contains("nodes") || !j["nodes"].is_array()) throw DataError(path + ": missing 'nodes' array");
    for (const json& n : j["nodes"]) {
      NodeParams node;
      node.id = str_field(n, "id", path + ": node");
      node.shed_cost = num_field(n, "shed_cost", path + ": node " + node.id);
      node.curtail_cost = num_field(n, "curtail_cost", path + ": node " + node.id);
      node.wind_capacity_mw = num_field_or(n, "wind_capacity_mw", 0.0, path + ": node " + node.id);
      grid.nodes.push_back(std::move(node));
    }
    if (j.contains("lines")) {
      if (!j["lines"].is_array()) throw DataError(path + ": 'lines' must be an array");
      for (const json& l : j["lines"]) {
        LineParams line;
        line.from = str_field(l, "from", path + ": line");
        line.to = str_field(l, "to", path + ": line");
        line.susceptance = num_field(l, "susceptance", path + ": line " + line.from + "-" + line.to);
        line.capacity = num_field(l, "capacity", path + ": line " + line.from + "-" + line.to);
        grid.lines.push_back(std::move(line));
      }
    }
    if (j.contains("generators")) {
      if (!j["generators"].is_array()) throw DataError(path + ": 'generators' must be an array");
      for (const json& g : j["generators"]) {
        GeneratorParams gen;
        gen.id = str_field(g, "id", path + ": generator");
        const std::string ctx = path + ": generator " + gen.id;
        gen.node = str_field(g, "node", ctx);
        gen.cost = num_field(g, "cost", ctx);
        gen.startup_cost = num_field(g, "startup_cost", ctx);
        gen.shutdown_cost = num_field(g, "shutdown_cost", ctx);
        gen.up_cost = num_field(g, "up_cost", ctx);
        gen.down_cost = num_field(g, "down_cost", ctx);
        gen.p_min = num_field(g, "p_min", ctx);
        gen.p_max = num_field(g, "p_max", ctx);
        gen.ramp = num_field(g, "ramp", ctx);
        gen.startup_ramp = num_field(g, "startup_ramp", ctx);
        gen.min_up = static_cast<int>(num_field_or(g, "min_up", 1.0, ctx));
        gen.min_down = static_cast<int>(num_field_or(g, "min_down", 1.0, ctx));
        gen.initial_status = static_cast<int>(num_field_or(g, "initial_status", 0.0, ctx));
        grid.generators.push_back(std::move(gen));
      }
    }
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  grid.finalize();
  return grid;
}

void save_grid(const Grid& grid, const std::string& path) {
  json j;
  j["base_mva"] = grid.base_mva;
  j["reference_node"] = grid.reference;
  j["nodes"] = json::array();
  for (const NodeParams& n : grid.nodes) {
    json node;
    node["id"] = n.id;
    node["shed_cost"] = n.shed_cost;
    node["curtail_cost"] = n.curtail_cost;
    node["wind_capacity_mw"] = n.wind_capacity_mw;
    j["nodes"].push_back(std::move(node));
  }
  j["lines"] = json::array();
  for (const LineParams& l : grid.lines) {
    json line;
    line["from"] = l.from;
    line["to"] = l.to;
    line["susceptance"] = l.susceptance;
    line["capacity"] = l.capacity;
    j["lines"].push_back(std::move(line));
  }
  j["generators"] = json::array();
  for (const GeneratorParams& g : grid.generators) {
    json gen;
    gen["id"] = g.id;
    gen["node"] = g.node;
    gen["cost"] = g.cost;
    gen["startup_cost"] = g.startup_cost;
    gen["shutdown_cost"] = g.shutdown_cost;
    gen["up_cost"] = g.up_cost;
    gen["down_cost"] = g.down_cost;
    gen["p_min"] = g.p_min;
    gen["p_max"] = g.p_max;
    gen["ramp"] = g.ramp;
    gen["startup_ramp"] = g.startup_ramp;
    gen["min_up"] = g.min_up;
    gen["min_down"] = g.min_down;
    gen["initial_status"] = g.initial_status;
    j["generators"].push_back(std::move(gen));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ScenarioDay> load_timeseries(const std::string& series_path,
                                         const std::string& actuals_path, const Grid& grid,
                                         const std::vector<std::string>& providers, int horizon,
                                         std::vector<std::string>* warnings) {
  if (horizon < 1) throw DataError("timeseries: horizon must be >= 1");
  if (providers.empty()) throw DataError("timeseries: provider list is empty");
  const int N = grid.num_nodes();
  const int K = static_cast<int>(providers.size());
  std::map<std::string, int> provider_index;
  for (int k = 0; k < K; ++k) provider_index[providers[k]] = k;

  struct DayData {
    std::vector<Series> fc_load, fc_wind;
    std::vector<char> fc_seen;  // k x N x T
    Series load, wind;
    std::vector<char> act_seen;  // N x T
  };
  std::map<int, DayData> table;
  const auto day_slot = [&](int day) -> DayData& {
    auto it = table.find(day);
    if (it == table.end()) {
      DayData dd;
      dd.fc_load.assign(K, Series(N, horizon));
      dd.fc_wind.assign(K, Series(N, horizon));
      dd.fc_seen.assign(static_cast<std::size_t>(K) * N * horizon, 0);
      dd.load = Series(N, horizon);
      dd.wind = Series(N, horizon);
      dd.act_seen.assign(static_cast<std::size_t>(N) * horizon, 0);
      it = table.emplace(day, std::move(dd)).first;
    }
    return it->second;
  };

  {
    std::ifstream in(series_path);
    if (!in) throw DataError("cannot open " + series_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(series_path + ": empty file");
    const auto header = split_line(line);
    const std::vector<std::string> expect = {"day", "hour", "node", "provider",
                                             "forecast_net_load", "forecast_wind"};
    if (header.size() < expect.size())
      throw DataError(series_path + ": expected columns day,hour,node,provider,forecast_net_load,forecast_wind");
    for (std::size_t c = 0; c < expect.size(); ++c)
      if (header[c] != expect[c])
        throw DataError(series_path + ": column " + std::to_string(c + 1) + " must be '" + expect[c] + "'");
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split_line(line);
      const std::string ctx = series_path + ":" + std::to_string(lineno);
      if (cells.size() < 6) throw DataError(ctx + ": expected 6 columns");
      const int day = parse_int(cells[0], ctx);
      const int hour = parse_int(cells[1], ctx);
      if (hour < 1 || hour > horizon)
        throw DataError(ctx + ": hour " + std::to_string(hour) + " outside 1.." + std::to_string(horizon));
      const int node = grid.node_index(cells[2]);
      if (node < 0) throw DataError(ctx + ": unknown node '" + cells[2] + "'");
      const auto pit = provider_index.find(cells[3]);
      if (pit == provider_index.end()) throw DataError(ctx + ": unknown provider '" + cells[3] + "'");
      const int k = pit->second;
      DayData& dd = day_slot(day);
      dd.fc_load[k].at(node, hour - 1) = parse_num(cells[4], ctx);
      dd.fc_wind[k].at(node, hour - 1) = parse_num(cells[5], ctx);
      dd.fc_seen[(static_cast<std::size_t>(k) * N + node) * horizon + (hour - 1)] = 1;
    }
  }

  bool actuals_have_wind = true;
  {
    std::ifstream in(actuals_path);
    if (!in) throw DataError("cannot open " + actuals_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(actuals_path + ": empty file");
    const auto header = split_line(line);
    if (header.size() < 4 || header[0] != "day" || header[1] != "hour" || header[2] != "node" ||
        header[3] != "net_load")
      throw DataError(actuals_path + ": expected columns day,hour,node,net_load[,wind]");
    actuals_have_wind = header.size() >= 5 && header[4] == "wind";
    if (!actuals_have_wind && warnings)
      warnings->push_back(actuals_path + ": no wind column; realized wind defaults to 0");
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split_line(line);
      const std::string ctx = actuals_path + ":" + std::to_string(lineno);
      if (cells.size() < (actuals_have_wind ? 5u : 4u)) throw DataError(ctx + ": too few columns");
      const int day = parse_int(cells[0], ctx);
      const int hour = parse_int(cells[1], ctx);
      if (hour < 1 || hour > horizon)
        throw DataError(ctx + ": hour " + std::to_string(hour) + " outside 1.." + std::to_string(horizon));
      const int node = grid.node_index(cells[2]);
      if (node < 0) throw DataError(ctx + ": unknown node '" + cells[2] + "'");
      DayData& dd = day_slot(day);
      dd.load.at(node, hour - 1) = parse_num(cells[3], ctx);
      dd.wind.at(node, hour - 1) = actuals_have_wind ? parse_num(cells[4], ctx) : 0.0;
      dd.act_seen[static_cast<std::size_t>(node) * horizon + (hour - 1)] = 1;
    }
  }

  std::vector<ScenarioDay> days;
  for (auto& [id, dd] : table) {
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i)
        for (int t = 0; t < horizon; ++t)
          if (!dd.fc_seen[(static_cast<std::size_t>(k) * N + i) * horizon + t])
            throw DataError(series_path + ": missing cell (day=" + std::to_string(id) +
                            ", hour=" + std::to_string(t + 1) + ", node=" + grid.nodes[i].id +
                            ", provider=" + providers[k] + ")");
    for (int i = 0; i < N; ++i)
      for (int t = 0; t < horizon; ++t)
        if (!dd.act_seen[static_cast<std::size_t>(i) * horizon + t])
          throw DataError(actuals_path + ": missing cell (day=" + std::to_string(id) +
                          ", hour=" + std::to_string(t + 1) + ", node=" + grid.nodes[i].id + ")");
    ScenarioDay day;
    day.id = id;
    day.horizon = horizon;
    day.fc_net_load = std::move(dd.fc_load);
    day.fc_wind = std::move(dd.fc_wind);
    day.net_load = std::move(dd.load);
    day.wind = std::move(dd.wind);
    day.validate(N);
    days.push_back(std::move(day));
  }
  if (days.empty()) throw DataError(series_path + ": no data rows");
  return days;
}

void save_timeseries(const std::vector<ScenarioDay>& days, const Grid& grid,
                     const std::vector<std::string>& providers, const std::string& series_path,
                     const std::string& actuals_path) {
  std::ofstream series(series_path, std::ios::binary);
  if (!series) throw IoError("cannot open " + series_path + " for writing");
  series << "day,hour,node,provider,forecast_net_load,forecast_wind\n";
  std::ofstream actuals(actuals_path, std::ios::binary);
  if (!actuals) throw IoError("cannot open " + actuals_path + " for writing");
  actuals << "day,hour,node,net_load,wind\n";
  for (const ScenarioDay& day : days) {
    for (int t = 0; t < day.horizon; ++t)
      for (int i = 0; i < grid.num_nodes(); ++i) {
        for (std::size_t k = 0; k < providers.size(); ++k)
          series << day.id << "," << (t + 1) << "," << grid.nodes[i].id << "," << providers[k] << ","
                 << fmt_full(day.fc_net_load[k].at(i, t)) << "," << fmt_full(day.fc_wind[k].at(i, t))
                 << "\n";
        actuals << day.id << "," << (t + 1) << "," << grid.nodes[i].id << ","
                << fmt_full(day.net_load.at(i, t)) << "," << fmt_full(day.wind.at(i, t)) << "\n";
      }
  }
  if (!series || !actuals) throw IoError("write failed for timeseries output");
}

RunConfig load_config(const std::string& path) {
  const json j = parse_json_file(path);
  RunConfig cfg;
  try {
    const fs::path base = fs::path(path).parent_path();
    const auto resolve = [&base](const std::string& p) {
      if (p.empty()) return p;
      fs::path fp(p);
      return fp.is_absolute() ? p : (base / fp).string();
    };
    cfg.grid_path = resolve(str_field(j, "grid", path));
    cfg.series_path = resolve(str_field(j, "series", path));
    cfg.actuals_path = resolve(str_field(j, "actuals", path));
    if (!j.contains("providers") || !j["providers"].is_array())
      throw DataError(path + ": missing 'providers' array");
    for (const json& p : j["providers"]) cfg.providers.push_back(p.get<std::string>());
    if (!j.contains("trainer")) throw DataError(path + ": missing 'trainer' (valid: ph, pfph, stm, rmse, fixed)");
    cfg.trainer = trainer_from_string(j["trainer"].get<std::string>());
    cfg.rho = num_field_or(j, "rho", 25000.0, path);
    cfg.eps = num_field_or(j, "eps", 1e-5, path);
    cfg.dprime = static_cast<int>(num_field_or(j, "dprime", 0.0, path));
    if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
    cfg.segments = static_cast<int>(num_field_or(j, "segments", 32.0, path));
    cfg.max_iter = static_cast<int>(num_field_or(j, "max_iter", 500.0, path));
    cfg.parallelism = static_cast<int>(num_field_or(j, "parallelism", 1.0, path));
    if (j.contains("fixed_lambda"))
      for (const json& v : j["fixed_lambda"]) cfg.fixed_lambda.push_back(v.get<double>());
    if (j.contains("train_days"))
      for (const json& v : j["train_days"]) cfg.train_days.push_back(v.get<int>());
    if (j.contains("test_days"))
      for (const json& v : j["test_days"]) cfg.test_days.push_back(v.get<int>());
    if (j.contains("out_dir")) cfg.out_dir = resolve(j["out_dir"].get<std::string>());
    if (j.contains("external_solver")) cfg.external_solver = j["external_solver"].get<std::string>();
    cfg.big_m = num_field_or(j, "big_m", 0.0, path);
    cfg.seed = static_cast<unsigned long>(num_field_or(j, "seed", 1.0, path));
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

void save_config(const RunConfig& cfg, const std::string& path) {
  json j;
  j["grid"] = cfg.grid_path;
  j["series"] = cfg.series_path;
  j["actuals"] = cfg.actuals_path;
  j["providers"] = cfg.providers;
  j["trainer"] = to_string(cfg.trainer);
  j["rho"] = cfg.rho;
  j["eps"] = cfg.eps;
  j["dprime"] = cfg.dprime;
  j["variant"] = cfg.variant;
  j["segments"] = cfg.segments;
  j["max_iter"] = cfg.max_iter;
  j["parallelism"] = cfg.parallelism;
  if (!cfg.fixed_lambda.empty()) j["fixed_lambda"] = cfg.fixed_lambda;
  j["train_days"] = cfg.train_days;
  j["test_days"] = cfg.test_days;
  j["out_dir"] = cfg.out_dir;
  if (!cfg.external_solver.empty()) j["external_solver"] = cfg.external_solver;
  j["big_m"] = cfg.big_m;
  j["seed"] = cfg.seed;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

void save_lambda_json(const std::vector<double>& lambda, const std::vector<std::string>& providers,
                      const std::string& trainer, bool converged, int iterations,
                      const std::string& path) {
  json j;
  j["trainer"] = trainer;
  j["providers"] = providers;
  j["lambda"] = lambda;
  j["converged"] = converged;
  j["iterations"] = iterations;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

std::vector<double> load_lambda_json(const std::string& path) {
  const json j = parse_json_file(path);
  try {
    if (!j.contains("lambda") || !j["lambda"].is_array())
      throw DataError(path + ": missing 'lambda' array");
    std::vector<double> lambda;
    for (const json& v : j["lambda"]) lambda.push_back(v.get<double>());
    return lambda;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace vfc
