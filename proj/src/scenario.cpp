#include "vfc/scenario.hpp"

#include <cmath>
#include <string>

namespace vfc {

namespace {

void check_shape(const Series& s, int nodes, int hours, const std::string& what, int day) {
  if (s.nodes != nodes || s.hours != hours ||
      s.v.size() != static_cast<std::size_t>(nodes) * hours)
    throw DataError("day " + std::to_string(day) + ": " + what + " has inconsistent shape");
}

}  // namespace

void ScenarioDay::validate(int expected_nodes) const {
  if (horizon < 1) throw DataError("day " + std::to_string(id) + ": horizon must be >= 1");
  if (fc_net_load.empty()) throw DataError("day " + std::to_string(id) + ": needs at least one provider");
  if (fc_net_load.size() != fc_wind.size())
    throw DataError("day " + std::to_string(id) + ": provider count differs between net load and wind");
  for (std::size_t k = 0; k < fc_net_load.size(); ++k) {
    check_shape(fc_net_load[k], expected_nodes, horizon, "forecast net load (provider " + std::to_string(k + 1) + ")", id);
    check_shape(fc_wind[k], expected_nodes, horizon, "forecast wind (provider " + std::to_string(k + 1) + ")", id);
    for (double w : fc_wind[k].v)
      if (w < 0.0) throw DataError("day " + std::to_string(id) + ": negative forecast wind");
  }
  check_shape(net_load, expected_nodes, horizon, "realized net load", id);
  check_shape(wind, expected_nodes, horizon, "realized wind", id);
  for (double w : wind.v)
    if (w < 0.0) throw DataError("day " + std::to_string(id) + ": negative realized wind");
}

Weights::Weights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw DataError("weights: empty vector");
  double sum = 0.0;
  for (double x : w_) {
    if (x < -1e-9 || x > 1.0 + 1e-9) throw DataError("weights: component outside [0, 1]");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("weights: components must sum to 1");
}

Weights Weights::unit(int k_providers, int which) {
  std::vector<double> w(k_providers, 0.0);
  w[which] = 1.0;
  return Weights(std::move(w));
}

Weights Weights::uniform(int k_providers) {
  std::vector<double> w(k_providers, 1.0 / k_providers);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) sum += w[k];
  w.back() = 1.0 - sum;  // exact simplex despite rounding
  return Weights(std::move(w));
}

Weights Weights::renormalized(const std::vector<double>& w, double* drift) {
  std::vector<double> c(w.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    c[k] = std::min(1.0, std::max(0.0, w[k]));
    sum += c[k];
  }
  if (sum <= 0.0) throw DataError("weights: cannot renormalize, nonpositive sum");
  double d = std::abs(sum - 1.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    d = std::max(d, std::abs(c[k] - w[k]));
    c[k] /= sum;
  }
  if (drift) *drift = d;
  return Weights(std::move(c));
}

}  // namespace vfc
