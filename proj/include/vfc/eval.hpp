#pragma once

#include <string>
#include <vector>

#include "vfc/grid.hpp"
#include "vfc/scenario.hpp"
#include "vfc/uc_model.hpp"

namespace vfc {

// One scored method: weights, average two-stage cost over the test days, and
// improvement columns against the single-provider and naive-average
// references.
struct EvalReport {
  std::string method;
  std::vector<double> lambda;
  double train_seconds = 0.0;
  double tst = 0.0;                     // average per-day two-stage cost
  std::vector<double> delta;            // one per unit-vector baseline, then uniform
  std::vector<int> day_ids;
  std::vector<CostBreakdown> per_day;   // aligned with day_ids
};

// Root-mean-square error of provider k's net-load forecast: inner mean over
// nodes and hours, outer mean over days, single square root at the end.
double rmse_per_provider(const std::vector<ScenarioDay>& days, int provider);

// Weights inversely proportional to the per-provider RMSE. Providers with
// zero RMSE share all weight equally; everyone else gets zero.
Weights rmse_weights(const std::vector<double>& rmse);

// Scores weights by realized two-stage cost over the test days (standard
// binary commitment unless asked otherwise) and fills the improvement
// columns against lambda = each unit vector and the uniform average.
EvalReport evaluate_tst(const Grid& grid, const Weights& weights,
                        const std::vector<ScenarioDay>& test_days,
                        UcVariant variant = UcVariant::Binary, const SolveOptions& opt = {},
                        int parallelism = 1);

// Average two-stage cost alone (no baseline columns).
double average_tst(const Grid& grid, const Weights& weights,
                   const std::vector<ScenarioDay>& days, UcVariant variant = UcVariant::Binary,
                   const SolveOptions& opt = {}, int parallelism = 1);

// CSV is written at full precision (re-parsing reproduces the values
// exactly); the Markdown table rounds weights to three decimals.
void write_report(const std::vector<EvalReport>& rows, const std::string& csv_path,
                  const std::string& md_path);

// One row per (day, cost component).
void write_per_day_breakdown(const EvalReport& report, const std::string& csv_path);

std::vector<EvalReport> read_report_csv(const std::string& csv_path);

}  // namespace vfc
