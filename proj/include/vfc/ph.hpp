#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vfc/grid.hpp"
#include "vfc/model.hpp"
#include "vfc/scenario.hpp"
#include "vfc/uc_model.hpp"

namespace vfc {

struct PHConfig {
  double rho = 25000.0;
  double eps = 1e-5;
  UcVariant variant = UcVariant::Relaxed;
  int segments = 32;
  int max_iter = 500;
  int active_set = 0;   // D' for the push-forward variant; 0 -> ceil(D/3)
  int parallelism = 1;
  SolveOptions solve;

  void validate(int num_days) const;
};

struct PHTraceRow {
  int tau = 0;
  std::vector<double> lambda_bar;
  double gap = 0.0;
  int active = 0;         // days re-solved this iteration
  long cum_solves = 0;
  double wall_s = 0.0;    // kept out of the deterministic trace file
};

struct PHState {
  int tau = 0;
  std::vector<std::vector<double>> lambda;  // per day
  std::vector<std::vector<double>> mu;      // per day
  std::vector<double> lambda_bar;
  double gap = 0.0;
  std::vector<PHTraceRow> trace;  // row 0 is the initialization
};

struct PHResult {
  Weights lambda = Weights::uniform(1);
  bool converged = false;
  int iterations = 0;
  long subproblem_solves = 0;
  double train_seconds = 0.0;
  PHState state;
  std::vector<std::string> warnings;
};

struct PHSubproblem {
  ModelInstance model;
  std::vector<int> lambda_vars;
  UcBlock uc;
  RtBlock rt;
};

// Single-day consensus subproblem: weights on the simplex, commitment block
// on the combined forecast, real-time block on realized data, objective
// stage1 + stage2 + mu'lambda + piecewise-linearized (rho/2)|lambda - bar|^2.
// rho == 0 omits the penalty entirely (used by the initialization solves).
PHSubproblem build_ph_subproblem(const Grid& grid, const ScenarioDay& day,
                                 const std::vector<double>& mu, double rho,
                                 const std::vector<double>& lambda_bar, const PHConfig& cfg);

std::vector<std::vector<double>> update_multipliers(const std::vector<std::vector<double>>& mu_prev,
                                                    double rho,
                                                    const std::vector<std::vector<double>>& lambda,
                                                    const std::vector<double>& lambda_bar);

double consensus_gap(const std::vector<std::vector<double>>& lambda,
                     const std::vector<double>& lambda_bar);

// Indices of the D' largest deviation scores (ties to the lower day index)
// and the complement, both ascending.
std::pair<std::vector<int>, std::vector<int>> select_active_set(
    const std::vector<std::vector<double>>& lambda_prev, const std::vector<double>& lambda_bar_prev,
    int d_prime);

using PHObserver = std::function<void(const PHState&)>;

PHResult run_ph(const Grid& grid, const std::vector<ScenarioDay>& days, const PHConfig& cfg,
                const PHObserver& observer = nullptr);
PHResult run_pfph(const Grid& grid, const std::vector<ScenarioDay>& days, const PHConfig& cfg,
                  const PHObserver& observer = nullptr);

// Deterministic trace CSV (tau, lambda components, gap, active-set size,
// cumulative subproblem solves). Wall-clock seconds go to a companion file so
// the trace itself is reproducible bit-for-bit.
void write_trace_csv(const std::vector<PHTraceRow>& trace, const std::string& path);
void write_timing_csv(const std::vector<PHTraceRow>& trace, const std::string& path);

}  // namespace vfc
