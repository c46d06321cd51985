#include "vfc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "vfc/errors.hpp"
#include "vfc/util.hpp"

namespace vfc {

double rmse_per_provider(const std::vector<ScenarioDay>& days, int provider) {
  if (days.empty()) throw DataError("rmse: empty day set");
  double outer = 0.0;
  for (const ScenarioDay& day : days) {
    if (provider < 0 || provider >= day.providers())
      throw DimensionError("rmse: provider index out of range");
    const Series& fc = day.fc_net_load[provider];
    double inner = 0.0;
    for (std::size_t idx = 0; idx < fc.v.size(); ++idx) {
      const double e = fc.v[idx] - day.net_load.v[idx];
      inner += e * e;
    }
    outer += inner / static_cast<double>(fc.v.size());
  }
  return std::sqrt(outer / static_cast<double>(days.size()));
}

Weights rmse_weights(const std::vector<double>& rmse) {
  if (rmse.empty()) throw DataError("rmse weights: empty input");
  for (double r : rmse)
    if (r < 0.0) throw DataError("rmse weights: negative RMSE");
  const int zero_count = static_cast<int>(std::count(rmse.begin(), rmse.end(), 0.0));
  std::vector<double> w(rmse.size(), 0.0);
  if (zero_count > 0) {
    // Perfect providers split all the weight.
    for (std::size_t k = 0; k < rmse.size(); ++k)
      if (rmse[k] == 0.0) w[k] = 1.0 / zero_count;
  } else {
    double sum = 0.0;
    for (double r : rmse) sum += 1.0 / r;
    for (std::size_t k = 0; k < rmse.size(); ++k) w[k] = (1.0 / rmse[k]) / sum;
  }
  return Weights::renormalized(w);
}

namespace {

// Per-day evaluations in parallel; day order of the aggregation is fixed by
// sorting on day id, so results do not depend on input order or scheduling.
std::vector<CostBreakdown> eval_days(const Grid& grid, const Weights& weights,
                                     const std::vector<const ScenarioDay*>& days, UcVariant variant,
                                     const SolveOptions& opt, int parallelism) {
  std::vector<CostBreakdown> out(days.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  const auto worker = [&]() {
    while (true) {
      const std::size_t w = next.fetch_add(1);
      if (w >= days.size() || failed.load()) return;
      try {
        out[w] = two_stage_cost(grid, weights, *days[w], variant, opt);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
      }
    }
  };
  const int width = std::max(1, std::min<int>(parallelism, static_cast<int>(days.size())));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failed.load()) throw SolverFailure(failure);
  return out;
}

std::vector<const ScenarioDay*> sorted_by_id(const std::vector<ScenarioDay>& days) {
  std::vector<const ScenarioDay*> ptrs;
  ptrs.reserve(days.size());
  for (const ScenarioDay& d : days) ptrs.push_back(&d);
  std::stable_sort(ptrs.begin(), ptrs.end(),
                   [](const ScenarioDay* a, const ScenarioDay* b) { return a->id < b->id; });
  return ptrs;
}

double average_total(const std::vector<CostBreakdown>& rows) {
  double s = 0.0;
  for (const CostBreakdown& cb : rows) s += cb.total;
  return s / static_cast<double>(rows.size());
}

}  // namespace

double average_tst(const Grid& grid, const Weights& weights, const std::vector<ScenarioDay>& days,
                   UcVariant variant, const SolveOptions& opt, int parallelism) {
  if (days.empty()) throw DataError("tst: empty day set");
  return average_total(eval_days(grid, weights, sorted_by_id(days), variant, opt, parallelism));
}

EvalReport evaluate_tst(const Grid& grid, const Weights& weights,
                        const std::vector<ScenarioDay>& test_days, UcVariant variant,
                        const SolveOptions& opt, int parallelism) {
  if (test_days.empty()) throw DataError("tst: empty day set");
  const int K = weights.size();
  const auto ptrs = sorted_by_id(test_days);

  EvalReport rep;
  rep.lambda = weights.values();
  rep.per_day = eval_days(grid, weights, ptrs, variant, opt, parallelism);
  for (const ScenarioDay* d : ptrs) rep.day_ids.push_back(d->id);
  rep.tst = average_total(rep.per_day);

  for (int k = 0; k < K; ++k) {
    const double base = average_total(eval_days(grid, Weights::unit(K, k), ptrs, variant, opt, parallelism));
    rep.delta.push_back(rep.tst - base);
  }
  const double base_avg =
      average_total(eval_days(grid, Weights::uniform(K), ptrs, variant, opt, parallelism));
  rep.delta.push_back(rep.tst - base_avg);
  return rep;
}

namespace {

std::vector<std::string> delta_names(int k_providers) {
  // Two providers reproduce the published table exactly; more providers get
  // one column per unit baseline plus the uniform average.
  if (k_providers == 2) return {"Delta_a", "Delta_b", "Delta_c"};
  std::vector<std::string> names;
  for (int k = 0; k < k_providers; ++k) names.push_back("Delta_u" + std::to_string(k + 1));
  names.push_back("Delta_avg");
  return names;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

void write_report(const std::vector<EvalReport>& rows, const std::string& csv_path,
                  const std::string& md_path) {
  const int K = rows.empty() ? 2 : static_cast<int>(rows.front().lambda.size());
  for (const EvalReport& r : rows)
    if (static_cast<int>(r.lambda.size()) != K)
      throw DimensionError("report: provider count differs between rows");
  const auto dn = delta_names(K);

  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open " + csv_path + " for writing");
  csv << "Method";
  for (int k = 0; k < K; ++k) csv << ",lambda_" << (k + 1);
  csv << ",Time_s,TST_star";
  for (const std::string& name : dn) csv << "," << name;
  csv << "\n";
  for (const EvalReport& r : rows) {
    csv << r.method;
    for (double l : r.lambda) csv << "," << fmt_full(l);
    csv << "," << fmt_full(r.train_seconds) << "," << fmt_full(r.tst);
    for (std::size_t i = 0; i < dn.size(); ++i)
      csv << "," << (i < r.delta.size() ? fmt_full(r.delta[i]) : std::string(""));
    csv << "\n";
  }
  if (!csv) throw IoError("write failed for " + csv_path);

  std::ofstream md(md_path, std::ios::binary);
  if (!md) throw IoError("cannot open " + md_path + " for writing");
  md << "| Method |";
  for (int k = 0; k < K; ++k) md << " λ*" << (k + 1) << " |";
  md << " Time (s) | TST* |";
  if (K == 2) md << " Δ_a | Δ_b | Δ_c |";
  else {
    for (int k = 0; k < K; ++k) md << " Δ_u" << (k + 1) << " |";
    md << " Δ_avg |";
  }
  md << "\n|---|";
  for (std::size_t i = 0; i < static_cast<std::size_t>(K) + 2 + dn.size(); ++i) md << "---|";
  md << "\n";
  for (const EvalReport& r : rows) {
    md << "| " << r.method << " |";
    for (double l : r.lambda) md << " " << fmt_fixed(l, 3) << " |";
    md << " " << fmt_fixed(r.train_seconds, 1) << " | " << fmt_fixed(r.tst, 0) << " |";
    for (std::size_t i = 0; i < dn.size(); ++i)
      md << " " << (i < r.delta.size() ? fmt_fixed(r.delta[i], 0) : std::string("-")) << " |";
    md << "\n";
  }
  if (!md) throw IoError("write failed for " + md_path);
}

void write_per_day_breakdown(const EvalReport& report, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + csv_path + " for writing");
  out << "day,component,value\n";
  for (std::size_t d = 0; d < report.per_day.size(); ++d) {
    const CostBreakdown& cb = report.per_day[d];
    const int id = report.day_ids[d];
    const std::pair<const char*, double> comps[] = {
        {"production", cb.production}, {"startup", cb.startup},   {"shutdown", cb.shutdown},
        {"fc_shed", cb.fc_shed},       {"fc_curtail", cb.fc_curtail}, {"rt_up", cb.rt_up},
        {"rt_down", cb.rt_down},       {"rt_shed", cb.rt_shed},   {"rt_curtail", cb.rt_curtail},
        {"total", cb.total}};
    for (const auto& [name, value] : comps) out << id << "," << name << "," << fmt_full(value) << "\n";
  }
  if (!out) throw IoError("write failed for " + csv_path);
}

std::vector<EvalReport> read_report_csv(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot read " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(csv_path + ": empty report");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "Method") throw DataError(csv_path + ": unexpected header");
  int K = 0;
  while (1 + K < static_cast<int>(header.size()) && header[1 + K].rfind("lambda_", 0) == 0) ++K;
  std::vector<EvalReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != static_cast<int>(header.size()))
      throw DataError(csv_path + ": ragged row");
    EvalReport r;
    r.method = cells[0];
    for (int k = 0; k < K; ++k) r.lambda.push_back(std::stod(cells[1 + k]));
    r.train_seconds = std::stod(cells[1 + K]);
    r.tst = std::stod(cells[2 + K]);
    for (std::size_t c = 3 + K; c < cells.size(); ++c)
      if (!cells[c].empty()) r.delta.push_back(std::stod(cells[c]));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace vfc
