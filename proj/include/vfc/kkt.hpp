#pragma once

#include <string>
#include <vector>

#include "vfc/grid.hpp"
#include "vfc/model.hpp"
#include "vfc/scenario.hpp"
#include "vfc/uc_model.hpp"

namespace vfc {

// Optimality system of a relaxed commitment block, derived mechanically from
// the block's rows: one free dual per equality, one nonnegative dual per
// inequality (all block inequalities are kept in <= form), one stationarity
// row per lower-level variable, one complementarity pair per inequality.
// Restricted to generators with min up/down times of 1; the dual rows for
// longer coupling windows are out of scope and rejected loudly.
//
// The regularized nonlinear treatment of complementarity (products bounded by
// a small epsilon and handed to an NLP solver) is documented here for
// completeness but intentionally not implemented: it requires a nonlinear
// solver class this library does not provide. Only the big-M linearization
// below is built.
struct KKTIneq {
  UcRowFamily family;
  int row = -1;        // model constraint id (<= form)
  int psi = -1;        // dual variable id (assigned by the single-level build)
  int z = -1;          // complementarity binary id (-1 when fixed by bounds)
  double slack_cap = 0.0;   // interval bound on rhs - activity
  bool always_tight = false;  // slack identically 0: binary fixed to 1
  bool never_tight = false;   // slack strictly positive: dual fixed to 0
};

struct KKTStationarity {
  int var = -1;  // lower-level variable
  double cost = 0.0;
  std::vector<std::pair<int, double>> eq_terms;    // (index into eq_rows, coef)
  std::vector<std::pair<int, double>> ineq_terms;  // (index into ineqs, coef)
  int row = -1;  // stationarity equality row id (assigned by the build)
};

struct KKTSystem {
  std::vector<int> eq_rows;   // balance, then flow definition, then reference
  std::vector<int> nu_vars;   // parallel to eq_rows (assigned by the build)
  int n_balance = 0, n_flowdef = 0, n_ref = 0;
  std::vector<KKTIneq> ineqs;
  std::vector<KKTStationarity> stationarity;
};

// Derives the system from an already-built block (requires bound_rows and the
// relaxed variant). Throws UnsupportedError naming the offending generator if
// any min up/down time exceeds 1.
KKTSystem assemble_kkt(const ModelInstance& model, const UcBlock& block, const Grid& grid);

// Residuals of a candidate primal/dual point. nu and psi are aligned with
// kkt.eq_rows and kkt.ineqs.
struct KKTResiduals {
  double stationarity = 0.0;       // max |c + A'nu + A'psi|
  double complementarity = 0.0;    // max |psi * slack|
  double dual_sign = 0.0;          // max (-psi)+
};
KKTResiduals kkt_residuals(const ModelInstance& model, const KKTSystem& kkt,
                           const std::vector<double>& x, const std::vector<double>& nu,
                           const std::vector<double>& psi);

// Maps LP row duals (convention c = A'y + z) onto (nu, psi) for the system.
void duals_from_lp(const ModelInstance& model, const KKTSystem& kkt, const Solution& sol,
                   std::vector<double>& nu, std::vector<double>& psi);

struct STMConfig {
  double big_m = 0.0;  // 0 -> 10 * largest cost coefficient * largest capacity
  double lambda_lo = 0.0, lambda_hi = 1.0;
  int max_model_vars = 60000;
  SolveOptions solve;
};

struct StmDayBlock {
  int day_id = 0;
  UcBlock uc;
  RtBlock rt;
  KKTSystem kkt;
};

struct BuiltStm {
  ModelInstance model;
  std::vector<int> lambda_vars;
  std::vector<StmDayBlock> days;
  double big_m = 0.0;
};

// One MILP over shared weights: per-day relaxed commitment primal, its
// optimality system with complementarity linearized through big-M switches,
// and the real-time block; objective is the day-average two-stage cost.
BuiltStm build_stm(const Grid& grid, const std::vector<ScenarioDay>& days, const STMConfig& cfg);

struct BigMFlag {
  int day_id = 0;
  std::string row;
  std::string kind;  // "dual" or "slack"
  double value = 0.0;
  double limit = 0.0;
};

struct BigMReport {
  bool clean = true;
  std::vector<BigMFlag> flags;
};

// Flags duals or slacks within 1% of the big-M constant (evidence that the
// linearization may be binding and M too small).
BigMReport validate_bigm(const BuiltStm& stm, const Solution& sol, double threshold = 0.99);

// Residuals of the embedded optimality systems at a solved point.
KKTResiduals stm_residuals(const BuiltStm& stm, const Solution& sol);

// Stage-one cost of one embedded day at a solved point.
double stm_day_stage1_cost(const BuiltStm& stm, int day_index, const Solution& sol);

}  // namespace vfc
