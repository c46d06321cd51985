#pragma once

// Shared desk-scale fixtures for the test suites.

#include <vector>

#include "vfc/grid.hpp"
#include "vfc/scenario.hpp"
#include "vfc/synth.hpp"
#include "vfc/util.hpp"

namespace vfc::testfx {

inline Grid single_node_grid(double cost = 10.0, double p_min = 10.0, double p_max = 100.0,
                             double shed_cost = 25000.0, double up_cost = 15.0,
                             double down_cost = 5.0, double ramp = 20.0) {
  Grid g;
  g.nodes.push_back({"n1", shed_cost, 50.0, 0.0});
  g.reference = "n1";
  GeneratorParams gen;
  gen.id = "g1";
  gen.node = "n1";
  gen.cost = cost;
  gen.startup_cost = 0.0;
  gen.shutdown_cost = 0.0;
  gen.up_cost = up_cost;
  gen.down_cost = down_cost;
  gen.p_min = p_min;
  gen.p_max = p_max;
  gen.ramp = ramp;
  gen.startup_ramp = p_max;
  g.generators.push_back(gen);
  g.finalize();
  return g;
}

// Three buses on a triangle, two generators; parameters chosen so commitment
// decisions carry real startup/min-power structure.
inline Grid three_bus_grid(double shed_cost = 6000.0) {
  Grid g;
  g.nodes.push_back({"n1", shed_cost, 50.0, 0.0});
  g.nodes.push_back({"n2", shed_cost, 50.0, 0.0});
  g.nodes.push_back({"n3", shed_cost, 50.0, 0.0});
  g.reference = "n1";
  g.lines.push_back({"n1", "n2", 10.0, 120.0});
  g.lines.push_back({"n2", "n3", 10.0, 120.0});
  g.lines.push_back({"n3", "n1", 10.0, 120.0});
  GeneratorParams a;
  a.id = "g1";
  a.node = "n1";
  a.cost = 18.0;
  a.startup_cost = 300.0;
  a.shutdown_cost = 60.0;
  a.up_cost = 40.0;
  a.down_cost = 5.0;
  a.p_min = 20.0;
  a.p_max = 160.0;
  a.ramp = 60.0;
  a.startup_ramp = 80.0;
  a.min_up = 2;
  a.min_down = 2;
  g.generators.push_back(a);
  GeneratorParams b;
  b.id = "g2";
  b.node = "n2";
  b.cost = 45.0;
  b.startup_cost = 80.0;
  b.shutdown_cost = 20.0;
  b.up_cost = 90.0;
  b.down_cost = 10.0;
  b.p_min = 5.0;
  b.p_max = 90.0;
  b.ramp = 90.0;
  b.startup_ramp = 90.0;
  g.generators.push_back(b);
  g.finalize();
  return g;
}

inline Series flat_series(int nodes, int hours, double value) {
  Series s(nodes, hours);
  for (double& v : s.v) v = value;
  return s;
}

// One-provider day with identical forecast and realization.
inline ScenarioDay perfect_day([[maybe_unused]] const Grid& grid, const Series& load, int id = 1) {
  ScenarioDay d;
  d.id = id;
  d.horizon = load.hours;
  d.fc_net_load = {load};
  d.fc_wind = {Series(load.nodes, load.hours)};
  d.net_load = load;
  d.wind = Series(load.nodes, load.hours);
  return d;
}

// Small random instance generator used by the relaxation-gap and enumeration
// tests: tight ramps and positive minimum outputs induce fractional
// relaxations, wind stays off so stage one is always feasible.
inline Grid random_gap_grid(Rng& rng, int nodes = 3, int gens = 2) {
  Grid g;
  for (int i = 0; i < nodes; ++i) g.nodes.push_back({"n" + std::to_string(i + 1), 4000.0, 50.0, 0.0});
  g.reference = "n1";
  for (int i = 0; i + 1 < nodes; ++i)
    g.lines.push_back({"n" + std::to_string(i + 1), "n" + std::to_string(i + 2), 10.0,
                       120.0 + 40.0 * rng.uniform()});
  if (nodes >= 3) g.lines.push_back({"n" + std::to_string(nodes), "n1", 10.0, 150.0});
  for (int k = 0; k < gens; ++k) {
    GeneratorParams gen;
    gen.id = "g" + std::to_string(k + 1);
    gen.node = "n" + std::to_string(1 + (k % nodes));
    gen.cost = 10.0 + 25.0 * rng.uniform();
    gen.startup_cost = 100.0 + 400.0 * rng.uniform();
    gen.shutdown_cost = 50.0 * rng.uniform();
    gen.up_cost = gen.cost * 2.0;
    gen.down_cost = gen.cost * 0.3;
    gen.p_min = 15.0 + 20.0 * rng.uniform();
    gen.p_max = gen.p_min + 60.0 + 60.0 * rng.uniform();
    gen.ramp = 10.0 + 25.0 * rng.uniform();
    gen.startup_ramp = std::max(gen.p_min, gen.ramp) + 10.0 * rng.uniform();
    gen.min_up = 1 + rng.uniform_int(0, 1);
    gen.min_down = 1;
    g.generators.push_back(gen);
  }
  g.finalize();
  return g;
}

inline Series random_load(Rng& rng, int nodes, int hours, double lo, double hi) {
  Series s(nodes, hours);
  for (double& v : s.v) v = rng.uniform(lo, hi);
  return s;
}

// The bundled benchmark family (criterion fixtures).
inline SynthParams benchmark_params() {
  SynthParams p;
  p.seed = 42;
  p.nodes = 3;
  p.horizon = 6;
  p.train_days = 10;
  p.test_days = 10;
  p.providers = 2;
  p.bias = {-2.0, 12.0};
  p.noise = {9.0, 3.0};
  p.base_load = 100.0;
  p.wind_share = 0.15;
  p.shed_cost = 6000.0;
  p.curtail_cost = 50.0;
  return p;
}

// Tiny family for fast property runs (multiplier conservation, determinism).
inline SynthParams tiny_params(unsigned long seed, int days = 3) {
  SynthParams p;
  p.seed = seed;
  p.nodes = 2;
  p.horizon = 3;
  p.train_days = days;
  p.test_days = 0;
  p.providers = 2;
  p.bias = {-3.0, 8.0};
  p.noise = {6.0, 2.0};
  p.base_load = 80.0;
  p.wind_share = 0.1;
  p.shed_cost = 3000.0;
  p.curtail_cost = 40.0;
  return p;
}

}  // namespace vfc::testfx
