#pragma once

#include <string>
#include <vector>

#include "vfc/grid.hpp"
#include "vfc/scenario.hpp"

namespace vfc {

// Parameters of the bundled synthetic benchmark family. Provider errors are
// controlled per provider through (bias, noise); the default setup gives
// provider 1 small bias with large noise and provider 2 a large positive bias
// with small noise, so accuracy-optimal and cost-optimal combinations differ.
//
// Generated instances stay inside a provably well-posed envelope: nonnegative
// net loads above twice the wind level, generators flexible enough to span
// realized swings, and forecast wind never below realized wind. Both stages
// then remain feasible for every weight vector on the simplex.
struct SynthParams {
  unsigned long seed = 42;
  int nodes = 3;
  int horizon = 6;
  int train_days = 10;
  int test_days = 10;
  int providers = 2;
  std::vector<double> bias;   // MW per provider (default {-2, +12})
  std::vector<double> noise;  // MW stddev per provider (default {9, 3})
  double base_load = 100.0;   // MW
  double wind_share = 0.15;   // wind level relative to base load; 0 disables
  double shed_cost = 6000.0;  // $/MWh
  double curtail_cost = 50.0;
  double line_capacity_factor = 3.0;  // line capacity = factor * base_load

  void validate() const;
  std::vector<double> effective_bias() const;
  std::vector<double> effective_noise() const;
};

struct SynthData {
  Grid grid;
  std::vector<ScenarioDay> train;  // day ids 1..train_days
  std::vector<ScenarioDay> test;   // day ids train_days+1..train_days+test_days
};

SynthData make_synthetic(const SynthParams& params);

// Writes grid.json, series.csv, actuals.csv, and a ready-to-run config.json
// into the directory. Identical parameters give byte-identical files.
void write_synthetic(const SynthParams& params, const std::string& dir);

}  // namespace vfc
