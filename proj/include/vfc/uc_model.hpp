#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vfc/grid.hpp"
#include "vfc/model.hpp"
#include "vfc/scenario.hpp"

namespace vfc {

enum class UcVariant { Binary, Relaxed };

// Row families of the commitment block, used for dual classification.
enum class UcRowFamily {
  Balance,      // equality, node-wise
  FlowDef,      // equality, line-wise
  RefAngle,     // equality
  MinUp,        // startup window within committed span
  MinDown,      // startup window within offline span
  StartupDef,   // startup indicator definition
  PowerMin,
  PowerMax,
  RampUp,
  RampDown,
  HullA,        // tightened previous-period output cap
  HullB,        // tightened output cap at startup
  HullC,        // tightened ramp-up
  HullD,        // tightened ramp-down
  ULower,
  UUpper,
  YLower,
  FlowMax,
  FlowMin,
  ShedLower,
  ShedUpper,
  CurLower,
  CurUpper,
};

const char* to_string(UcRowFamily f);

struct UcBlockRow {
  UcRowFamily family;
  int row = -1;  // model constraint id
  int entity = -1;  // generator / node / line index
  int t = 0;        // 1-based hour
};

// Combined forecast parameterized by weight variables already in the model.
struct LambdaForecast {
  std::vector<int> lambda_vars;
  const std::vector<Series>* net_load = nullptr;  // per provider
  const std::vector<Series>* wind = nullptr;
};

struct UcBlockOptions {
  UcVariant variant = UcVariant::Binary;
  // Encode every simple cap as an explicit inequality row (so each carries a
  // dual) instead of a variable bound. Requires the relaxed variant.
  bool bound_rows = false;
  std::string tag;  // name suffix, e.g. "_d7"
};

// Commitment-stage block inside a larger model: variable tables, row
// registry, and the stage-one cost terms (not yet added to the objective).
struct UcBlock {
  int G = 0, T = 0, N = 0, L = 0;
  bool relaxed = false;
  bool bound_rows = false;

  std::vector<int> p, u, y, flow, angle, shed, curtail;  // y undefined at t=1
  std::vector<int> lambda;  // empty for fixed-forecast blocks

  std::vector<int> balance_rows;  // i x t
  std::vector<int> flowdef_rows;  // l x t
  std::vector<int> ref_rows;      // t
  std::vector<UcBlockRow> ineq_rows;

  std::vector<std::pair<int, double>> cost_terms;

  // Natural variable ranges for interval reasoning (parallel to var ids).
  std::vector<int> nb_var;
  std::vector<double> nb_lo, nb_hi;

  int idx_gt(int g, int t) const { return g * T + t; }
  int idx_it(int i, int t) const { return i * T + t; }
  int idx_lt(int l, int t) const { return l * T + t; }
};

// Real-time block. Schedule enters either as constants (solved commitment)
// or as references to the commitment block's variables.
struct RtBlock {
  int G = 0, T = 0, N = 0, L = 0;
  std::vector<int> r_up, r_dn, flow, angle, shed, curtail;
  std::vector<std::pair<int, double>> cost_terms;

  int idx_gt(int g, int t) const { return g * T + t; }
  int idx_it(int i, int t) const { return i * T + t; }
  int idx_lt(int l, int t) const { return l * T + t; }
};

struct RtSolutionValues {
  int G = 0, T = 0, N = 0, L = 0;
  std::vector<double> r_up, r_dn, flow, angle, shed, curtail;
  double objective = 0.0;
};

// ---- block builders (compose into an existing model) ----

UcBlock add_uc_block(ModelInstance& model, const Grid& grid, int T,
                     const Series* fixed_net_load, const Series* fixed_wind,
                     const LambdaForecast* combined, const UcBlockOptions& opt);

RtBlock add_rt_block(ModelInstance& model, const Grid& grid, const Series& net_load,
                     const Series& wind, const UcSolution* fixed_schedule,
                     const UcBlock* schedule_vars, const std::string& tag);

// ---- whole-model builders ----

struct BuiltUc {
  ModelInstance model;
  UcBlock block;
};

struct BuiltRt {
  ModelInstance model;
  RtBlock block;
};

BuiltUc build_uc(const Grid& grid, const Series& net_load, const Series& wind, int T);
BuiltUc build_ucr(const Grid& grid, const Series& net_load, const Series& wind, int T);
BuiltRt build_rt(const Grid& grid, const UcSolution& uc_sol, const Series& net_load,
                 const Series& wind, int T);

// ---- operations ----

std::pair<Series, Series> combine_forecasts(const Weights& weights, const ScenarioDay& day);

UcSolution extract_uc_solution(const UcBlock& block, const Solution& sol);
RtSolutionValues extract_rt_solution(const RtBlock& block, const Solution& sol);

CostBreakdown two_stage_cost(const Grid& grid, const Weights& weights, const ScenarioDay& day,
                             UcVariant variant, const SolveOptions& opt = {});

// ---- solution checkers (independent re-evaluation of the physics) ----

double max_balance_residual(const Grid& grid, const Series& net_load, const UcSolution& sol);
double max_flow_residual(const Grid& grid, const UcSolution& sol);
// Startup-indicator and min up/down window logic; returns the worst violation.
double commitment_logic_violation(const Grid& grid, const UcSolution& sol);

}  // namespace vfc
