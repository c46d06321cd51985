#pragma once

#include <vector>

#include "vfc/errors.hpp"

namespace vfc {

// Dense node x hour series, hours 1..T stored 0-based.
struct Series {
  int nodes = 0;
  int hours = 0;
  std::vector<double> v;

  Series() = default;
  Series(int n, int t, double fill = 0.0) : nodes(n), hours(t), v(static_cast<std::size_t>(n) * t, fill) {}

  double& at(int i, int t) { return v[static_cast<std::size_t>(i) * hours + t]; }
  double at(int i, int t) const { return v[static_cast<std::size_t>(i) * hours + t]; }
};

// One training or testing day: per-provider forecasts plus realizations.
struct ScenarioDay {
  int id = 0;
  int horizon = 0;
  std::vector<Series> fc_net_load;  // one per provider
  std::vector<Series> fc_wind;
  Series net_load;                  // realized
  Series wind;

  int providers() const { return static_cast<int>(fc_net_load.size()); }

  // Shape and sign invariants; throws DataError.
  void validate(int expected_nodes) const;
};

// Convex combination weights over providers.
class Weights {
 public:
  explicit Weights(std::vector<double> w);

  static Weights unit(int k_providers, int which);
  static Weights uniform(int k_providers);
  // Clamp to [0,1] and renormalize; throws DataError if the sum is <= 0.
  static Weights renormalized(const std::vector<double>& w, double* drift = nullptr);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int k) const { return w_[k]; }
  const std::vector<double>& values() const { return w_; }

 private:
  std::vector<double> w_;
};

struct CostBreakdown {
  double production = 0.0;
  double startup = 0.0;
  double shutdown = 0.0;
  double fc_shed = 0.0;     // forecast-stage shedding
  double fc_curtail = 0.0;  // forecast-stage curtailment
  double rt_up = 0.0;       // upward redispatch
  double rt_down = 0.0;     // downward redispatch
  double rt_shed = 0.0;     // realized shedding
  double rt_curtail = 0.0;  // realized curtailment
  double total = 0.0;

  double uc_cost() const { return production + startup + shutdown + fc_shed + fc_curtail; }
  double rt_cost() const { return rt_up + rt_down + rt_shed + rt_curtail; }
};

// Day-ahead schedule extracted from a solved commitment model.
struct UcSolution {
  int generators = 0, horizon = 0, nodes = 0, lines = 0;
  std::vector<double> p;        // g x t
  std::vector<double> u;        // g x t ({0,1} for the binary variant, [0,1] relaxed)
  std::vector<double> y;        // g x t, zero at t=1 (startups are defined from t=2)
  std::vector<double> flow;     // l x t
  std::vector<double> angle;    // i x t
  std::vector<double> shed;     // i x t
  std::vector<double> curtail;  // i x t
  double objective = 0.0;

  double pv(int g, int t) const { return p[static_cast<std::size_t>(g) * horizon + t]; }
  double uv(int g, int t) const { return u[static_cast<std::size_t>(g) * horizon + t]; }
  double yv(int g, int t) const { return y[static_cast<std::size_t>(g) * horizon + t]; }
};

}  // namespace vfc
