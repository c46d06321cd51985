#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vfc/errors.hpp"
#include "vfc/milp.hpp"
#include "vfc/simplex.hpp"
#include "vfc/uc_model.hpp"

using namespace vfc;
using namespace vfc::testfx;

namespace {

// Enumeration oracle for the binary commitment problem: every on/off pattern
// of the hour-2..T binaries fixed through bounds, an LP per fixing.
double enumerate_uc(const BuiltUc& uc) {
  const ModelInstance& m = uc.model;
  std::vector<int> bins;
  for (int j = 0; j < m.num_vars(); ++j)
    if (m.var(j).integer) bins.push_back(j);
  REQUIRE(bins.size() <= 16);
  std::vector<double> lb(m.num_vars()), ub(m.num_vars());
  for (int j = 0; j < m.num_vars(); ++j) {
    lb[j] = m.var(j).lb;
    ub[j] = m.var(j).ub;
  }
  bool any = false;
  double best = 0.0;
  for (int pattern = 0; pattern < (1 << bins.size()); ++pattern) {
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double v = (pattern & (1 << k)) ? 1.0 : 0.0;
      lb[bins[k]] = v;
      ub[bins[k]] = v;
    }
    const Solution rel = solve_lp_with_bounds(m, lb, ub);
    if (rel.status != SolveStatus::Optimal) continue;
    if (!any || rel.objective < best) {
      any = true;
      best = rel.objective;
    }
  }
  REQUIRE(any);
  return best;
}

ScenarioDay random_feasible_day(Rng& rng, const Grid& grid, int T) {
  ScenarioDay d;
  d.id = 1;
  d.horizon = T;
  const int N = grid.num_nodes();
  d.net_load = random_load(rng, N, T, 30.0, 90.0);
  d.wind = Series(N, T);
  Series fc1 = d.net_load, fc2 = d.net_load;
  for (double& v : fc1.v) v += rng.normal(0.0, 8.0);
  for (double& v : fc2.v) v += 10.0 + rng.normal(0.0, 3.0);
  for (double& v : fc1.v) v = std::max(v, 0.0);
  for (double& v : fc2.v) v = std::max(v, 0.0);
  d.fc_net_load = {fc1, fc2};
  d.fc_wind = {Series(N, T), Series(N, T)};
  return d;
}

}  // namespace

TEST_CASE("combining with a unit weight reproduces that provider") {
  const SynthData data = make_synthetic(tiny_params(3));
  const ScenarioDay& day = data.train.front();
  const auto [load, wind] = combine_forecasts(Weights::unit(2, 0), day);
  for (std::size_t i = 0; i < load.v.size(); ++i) {
    CHECK(load.v[i] == doctest::Approx(day.fc_net_load[0].v[i]).epsilon(1e-12));
    CHECK(wind.v[i] == doctest::Approx(day.fc_wind[0].v[i]).epsilon(1e-12));
  }
}

TEST_CASE("half-half combination averages the providers") {
  Grid grid = single_node_grid();
  ScenarioDay d;
  d.id = 1;
  d.horizon = 1;
  d.fc_net_load = {flat_series(1, 1, 100.0), flat_series(1, 1, 50.0)};
  d.fc_wind = {Series(1, 1), Series(1, 1)};
  d.net_load = flat_series(1, 1, 80.0);
  d.wind = Series(1, 1);
  const auto [load, wind] = combine_forecasts(Weights({0.5, 0.5}), d);
  CHECK(load.at(0, 0) == doctest::Approx(75.0));
  CHECK(wind.at(0, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(combine_forecasts(Weights({1.0}), d), DimensionError);
}

TEST_CASE("renormalized published weights form a weighted mean") {
  // Reported one-month weights 0.471/0.528 renormalized onto the simplex.
  double drift = 0.0;
  const Weights w = Weights::renormalized({0.471, 0.528}, &drift);
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));
  ScenarioDay d;
  d.id = 1;
  d.horizon = 1;
  d.fc_net_load = {flat_series(1, 1, 100.0), flat_series(1, 1, 50.0)};
  d.fc_wind = {Series(1, 1), Series(1, 1)};
  d.net_load = flat_series(1, 1, 80.0);
  d.wind = Series(1, 1);
  const auto [load, wind] = combine_forecasts(w, d);
  const double expect = w[0] * 100.0 + w[1] * 50.0;
  CHECK(load.at(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(load.at(0, 0) > 50.0);
  CHECK(load.at(0, 0) < 100.0);
}

TEST_CASE("single generator meets the forecast") {
  const Grid grid = single_node_grid();
  const Series load = flat_series(1, 1, 50.0);
  const Series wind(1, 1);
  BuiltUc uc = build_uc(grid, load, wind, 1);
  const Solution s = solve_milp(uc.model);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(500.0).epsilon(1e-9));
  const UcSolution sol = extract_uc_solution(uc.block, s);
  CHECK(sol.pv(0, 0) == doctest::Approx(50.0));
  CHECK(sol.shed[0] == doctest::Approx(0.0));
}

TEST_CASE("capacity-forced shedding is priced at the shed cost") {
  const Grid grid = single_node_grid();
  const Series load = flat_series(1, 1, 150.0);
  const Series wind(1, 1);
  BuiltUc uc = build_uc(grid, load, wind, 1);
  const Solution s = solve_milp(uc.model);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(100.0 * 10.0 + 50.0 * 25000.0).epsilon(1e-9));
  const UcSolution sol = extract_uc_solution(uc.block, s);
  CHECK(sol.pv(0, 0) == doctest::Approx(100.0));
  CHECK(sol.shed[0] == doctest::Approx(50.0));
}

TEST_CASE("nonpositive horizon and unfinalized grids are rejected") {
  const Grid grid = single_node_grid();
  const Series load = flat_series(1, 1, 50.0);
  CHECK_THROWS_AS(build_uc(grid, load, Series(1, 1), 0), ModelError);
  Grid raw = grid;
  raw.ref_index = -1;
  CHECK_THROWS_AS(build_uc(raw, load, Series(1, 1), 1), DataError);
}

TEST_CASE("commitment objective matches exhaustive enumeration") {
  Rng rng(1234);
  const Grid grid = three_bus_grid();
  const int T = 4;
  const Series load = random_load(rng, 3, T, 25.0, 80.0);
  const Series wind(3, T);
  BuiltUc uc = build_uc(grid, load, wind, T);
  const Solution s = solve_milp(uc.model);
  REQUIRE(s.status == SolveStatus::Optimal);
  const double oracle = enumerate_uc(uc);
  CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-9));

  const UcSolution sol = extract_uc_solution(uc.block, s);
  CHECK(max_balance_residual(grid, load, sol) <= 1e-6);
  CHECK(max_flow_residual(grid, sol) <= 1e-6);
  CHECK(commitment_logic_violation(grid, sol) <= 1e-6);
}

TEST_CASE("relaxation lower-bounds the binary problem") {
  Rng rng(99);
  int strictly_positive = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const Grid grid = random_gap_grid(rng);
    const int T = 4;
    const Series load = random_load(rng, grid.num_nodes(), T, 20.0, 95.0);
    const Series wind(grid.num_nodes(), T);
    BuiltUc uc = build_uc(grid, load, wind, T);
    BuiltUc ucr = build_ucr(grid, load, wind, T);
    REQUIRE_FALSE(ucr.model.has_integers());
    const Solution sb = solve_milp(uc.model);
    const Solution sr = solve_lp(ucr.model);
    REQUIRE(sb.status == SolveStatus::Optimal);
    REQUIRE(sr.status == SolveStatus::Optimal);
    CHECK(sr.objective <= sb.objective + 1e-6);
    if (sb.objective - sr.objective > 1e-4) ++strictly_positive;
  }
  CHECK(strictly_positive >= 1);
}

TEST_CASE("a must-run single generator has zero integrality gap") {
  const Grid grid = single_node_grid(10.0, 10.0, 100.0);
  const Series load = flat_series(1, 3, 60.0);
  const Series wind(1, 3);
  BuiltUc uc = build_uc(grid, load, wind, 3);
  BuiltUc ucr = build_ucr(grid, load, wind, 3);
  const Solution sb = solve_milp(uc.model);
  const Solution sr = solve_lp(ucr.model);
  REQUIRE(sb.status == SolveStatus::Optimal);
  REQUIRE(sr.status == SolveStatus::Optimal);
  CHECK(sr.objective == doctest::Approx(sb.objective).epsilon(1e-9));
}

TEST_CASE("perfect realization needs no redispatch") {
  const Grid grid = single_node_grid(10.0, 0.0, 100.0);
  const Series load = flat_series(1, 2, 50.0);
  const Series wind(1, 2);
  BuiltUc uc = build_uc(grid, load, wind, 2);
  const Solution s = solve_milp(uc.model);
  REQUIRE(s.status == SolveStatus::Optimal);
  const UcSolution sol = extract_uc_solution(uc.block, s);
  BuiltRt rt = build_rt(grid, sol, load, wind, 2);
  const Solution rs = solve_lp(rt.model);
  REQUIRE(rs.status == SolveStatus::Optimal);
  CHECK(rs.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("a single balancing action costs the redispatch price") {
  const Grid grid = single_node_grid(10.0, 0.0, 100.0, 25000.0, 15.0, 5.0, 20.0);
  // Schedule 50 at hour 1, realize 60: ten megawatts up at $15.
  UcSolution fixed;
  fixed.generators = 1;
  fixed.horizon = 1;
  fixed.nodes = 1;
  fixed.lines = 0;
  fixed.p = {50.0};
  fixed.u = {1.0};
  fixed.y = {0.0};
  fixed.angle = {0.0};
  fixed.shed = {0.0};
  fixed.curtail = {0.0};
  const Series realized = flat_series(1, 1, 60.0);
  BuiltRt rt = build_rt(grid, fixed, realized, Series(1, 1), 1);
  const Solution rs = solve_lp(rt.model);
  REQUIRE(rs.status == SolveStatus::Optimal);
  CHECK(rs.objective == doctest::Approx(150.0).epsilon(1e-9));
  const RtSolutionValues rsol = extract_rt_solution(rt.block, rs);
  CHECK(rsol.r_up[0] == doctest::Approx(10.0));
}

TEST_CASE("real-time objective matches an independent re-solve") {
  Rng rng(2718);
  const Grid grid = three_bus_grid();
  const int T = 3;
  const Series load = random_load(rng, 3, T, 30.0, 80.0);
  const Series wind(3, T);
  BuiltUc uc = build_uc(grid, load, wind, T);
  const Solution us = solve_milp(uc.model);
  REQUIRE(us.status == SolveStatus::Optimal);
  const UcSolution usol = extract_uc_solution(uc.block, us);

  Series realized = load;
  for (double& v : realized.v) v = std::max(0.0, v + rng.normal(0.0, 6.0));
  BuiltRt rt = build_rt(grid, usol, realized, wind, T);
  const Solution r1 = solve_lp(rt.model);
  REQUIRE(r1.status == SolveStatus::Optimal);

  // Independent check: rebuild from scratch and solve the fresh model.
  BuiltRt rt2 = build_rt(grid, usol, realized, wind, T);
  const Solution r2 = solve_lp(rt2.model);
  REQUIRE(r2.status == SolveStatus::Optimal);
  CHECK(r1.objective == doctest::Approx(r2.objective).epsilon(1e-10));
  CHECK(weak_duality_residual(rt.model, r1) <= 1e-6);
}

TEST_CASE("two-stage composition adds the stage costs") {
  const Grid grid = single_node_grid(10.0, 0.0, 100.0, 25000.0, 15.0, 5.0, 20.0);
  ScenarioDay d;
  d.id = 7;
  d.horizon = 1;
  d.fc_net_load = {flat_series(1, 1, 50.0)};
  d.fc_wind = {Series(1, 1)};
  d.net_load = flat_series(1, 1, 60.0);
  d.wind = Series(1, 1);
  const CostBreakdown cb = two_stage_cost(grid, Weights({1.0}), d, UcVariant::Binary);
  CHECK(cb.production == doctest::Approx(500.0));
  CHECK(cb.rt_up == doctest::Approx(150.0));
  CHECK(cb.total == doctest::Approx(650.0));
  CHECK(cb.total == doctest::Approx(cb.uc_cost() + cb.rt_cost()));
}

TEST_CASE("perfect forecast leaves only the commitment cost") {
  const Grid grid = single_node_grid(10.0, 0.0, 100.0);
  const ScenarioDay d = perfect_day(grid, flat_series(1, 3, 42.0));
  const CostBreakdown cb = two_stage_cost(grid, Weights({1.0}), d, UcVariant::Binary);
  CHECK(cb.rt_cost() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cb.total == doctest::Approx(cb.uc_cost()));
}

TEST_CASE("two-stage cost stays feasible across the simplex") {
  Rng rng(31337);
  const SynthData data = make_synthetic(tiny_params(11, 2));
  for (int trial = 0; trial < 12; ++trial) {
    const double l1 = rng.uniform();
    const Weights w({l1, 1.0 - l1});
    for (const ScenarioDay& day : data.train) {
      const CostBreakdown cb = two_stage_cost(data.grid, w, day,
                                              trial % 2 ? UcVariant::Binary : UcVariant::Relaxed);
      CHECK(cb.total >= 0.0);
    }
  }
}

TEST_CASE("raising the shed cost never lowers the commitment objective") {
  Rng rng(55);
  Grid grid = three_bus_grid(800.0);
  const Series load = random_load(rng, 3, 3, 60.0, 140.0);
  const Series wind(3, 3);
  BuiltUc cheap = build_uc(grid, load, wind, 3);
  const Solution s1 = solve_milp(cheap.model);
  REQUIRE(s1.status == SolveStatus::Optimal);
  for (NodeParams& n : grid.nodes) n.shed_cost *= 10.0;
  BuiltUc dear = build_uc(grid, load, wind, 3);
  const Solution s2 = solve_milp(dear.model);
  REQUIRE(s2.status == SolveStatus::Optimal);
  CHECK(s2.objective >= s1.objective - 1e-6);
}

TEST_CASE("lambda-parameterized block matches fixed data at unit weights") {
  Rng rng(4242);
  const Grid grid = three_bus_grid();
  ScenarioDay day = random_feasible_day(rng, grid, 3);

  ModelInstance m;
  std::vector<int> lambda;
  lambda.push_back(m.add_variable("lambda_1", 1.0, 1.0));  // pinned to provider 1
  lambda.push_back(m.add_variable("lambda_2", 0.0, 0.0));
  m.add_constraint("simplex", lambda, {1.0, 1.0}, Sense::Equal, 1.0);
  LambdaForecast lf;
  lf.lambda_vars = lambda;
  lf.net_load = &day.fc_net_load;
  lf.wind = &day.fc_wind;
  UcBlockOptions opt;
  opt.variant = UcVariant::Relaxed;
  const UcBlock blk = add_uc_block(m, grid, day.horizon, nullptr, nullptr, &lf, opt);
  for (const auto& [var, coef] : blk.cost_terms) m.add_objective(var, coef);
  const Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::Optimal);

  BuiltUc fixed = build_ucr(grid, day.fc_net_load[0], day.fc_wind[0], day.horizon);
  const Solution sf = solve_lp(fixed.model);
  REQUIRE(sf.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(sf.objective).epsilon(1e-7));
}
