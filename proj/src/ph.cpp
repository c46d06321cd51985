#include "vfc/ph.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "vfc/errors.hpp"
#include "vfc/milp.hpp"
#include "vfc/pwl.hpp"
#include "vfc/util.hpp"

namespace vfc {

void PHConfig::validate(int num_days) const {
  if (!(rho > 0.0)) throw DataError("consensus config: rho must be > 0");
  if (!(eps > 0.0)) throw DataError("consensus config: eps must be > 0");
  if (segments < 1) throw DataError("consensus config: segments must be >= 1");
  if (max_iter < 1) throw DataError("consensus config: max_iter must be >= 1");
  if (parallelism < 1) throw DataError("consensus config: parallelism must be >= 1");
  if (active_set < 0 || active_set > num_days)
    throw DataError("consensus config: active-set size must lie in [1, D]");
}

PHSubproblem build_ph_subproblem(const Grid& grid, const ScenarioDay& day,
                                 const std::vector<double>& mu, double rho,
                                 const std::vector<double>& lambda_bar, const PHConfig& cfg) {
  day.validate(grid.num_nodes());
  const int K = day.providers();
  if (static_cast<int>(mu.size()) != K || static_cast<int>(lambda_bar.size()) != K)
    throw DimensionError("subproblem day " + std::to_string(day.id) +
                         ": multiplier/average length differs from provider count");

  PHSubproblem sp;
  ModelInstance& m = sp.model;

  for (int k = 0; k < K; ++k)
    sp.lambda_vars.push_back(m.add_variable("lambda_" + std::to_string(k + 1), 0.0, 1.0));
  {
    std::vector<double> ones(K, 1.0);
    m.add_constraint("simplex", sp.lambda_vars, ones, Sense::Equal, 1.0);
  }

  LambdaForecast lf;
  lf.lambda_vars = sp.lambda_vars;
  lf.net_load = &day.fc_net_load;
  lf.wind = &day.fc_wind;
  UcBlockOptions uopt;
  uopt.variant = cfg.variant;
  sp.uc = add_uc_block(m, grid, day.horizon, nullptr, nullptr, &lf, uopt);
  sp.rt = add_rt_block(m, grid, day.net_load, day.wind, nullptr, &sp.uc, "");

  for (const auto& [var, coef] : sp.uc.cost_terms) m.add_objective(var, coef);
  for (const auto& [var, coef] : sp.rt.cost_terms) m.add_objective(var, coef);
  for (int k = 0; k < K; ++k) m.add_objective(sp.lambda_vars[k], mu[k]);
  if (rho > 0.0) add_pwl_quadratic(m, sp.lambda_vars, lambda_bar, rho / 2.0, cfg.segments);
  return sp;
}

std::vector<std::vector<double>> update_multipliers(const std::vector<std::vector<double>>& mu_prev,
                                                    double rho,
                                                    const std::vector<std::vector<double>>& lambda,
                                                    const std::vector<double>& lambda_bar) {
  if (mu_prev.size() != lambda.size()) throw DimensionError("multiplier update: day count mismatch");
  std::vector<std::vector<double>> mu(mu_prev.size());
  for (std::size_t d = 0; d < mu_prev.size(); ++d) {
    if (mu_prev[d].size() != lambda_bar.size() || lambda[d].size() != lambda_bar.size())
      throw DimensionError("multiplier update: component count mismatch");
    mu[d].resize(lambda_bar.size());
    for (std::size_t k = 0; k < lambda_bar.size(); ++k)
      mu[d][k] = mu_prev[d][k] + rho * (lambda[d][k] - lambda_bar[k]);
  }
  return mu;
}

double consensus_gap(const std::vector<std::vector<double>>& lambda,
                     const std::vector<double>& lambda_bar) {
  double g = 0.0;
  for (const auto& ld : lambda) {
    if (ld.size() != lambda_bar.size()) throw DimensionError("consensus gap: component count mismatch");
    g += norm2(ld, lambda_bar);
  }
  return g;
}

std::pair<std::vector<int>, std::vector<int>> select_active_set(
    const std::vector<std::vector<double>>& lambda_prev, const std::vector<double>& lambda_bar_prev,
    int d_prime) {
  const int D = static_cast<int>(lambda_prev.size());
  if (d_prime < 1 || d_prime > D) throw DataError("active-set size must lie in [1, D]");
  std::vector<double> ds(D);
  for (int d = 0; d < D; ++d) ds[d] = norm2(lambda_prev[d], lambda_bar_prev);
  std::vector<int> order(D);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (ds[a] != ds[b]) return ds[a] > ds[b];
    return a < b;
  });
  std::vector<int> active(order.begin(), order.begin() + d_prime);
  std::vector<int> stale(order.begin() + d_prime, order.end());
  std::sort(active.begin(), active.end());
  std::sort(stale.begin(), stale.end());
  return {std::move(active), std::move(stale)};
}

namespace {

std::vector<double> day_average(const std::vector<std::vector<double>>& lambda, int K) {
  std::vector<double> bar(K, 0.0);
  for (const auto& ld : lambda)
    for (int k = 0; k < K; ++k) bar[k] += ld[k];
  for (int k = 0; k < K; ++k) bar[k] /= static_cast<double>(lambda.size());
  return bar;
}

// Solves the listed days' subproblems; results land in fixed slots so the
// reduction order is independent of scheduling.
void solve_days(const Grid& grid, const std::vector<ScenarioDay>& days,
                const std::vector<int>& which, const std::vector<std::vector<double>>& mu,
                double rho, const std::vector<double>& lambda_bar, const PHConfig& cfg,
                std::vector<std::vector<double>>& lambda_out) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  const auto worker = [&]() {
    while (true) {
      const std::size_t w = next.fetch_add(1);
      if (w >= which.size() || failed.load()) return;
      const int d = which[w];
      try {
        PHSubproblem sp = build_ph_subproblem(grid, days[d], mu[d], rho, lambda_bar, cfg);
        const Solution sol = solve_model(sp.model, cfg.solve);
        if (sol.status != SolveStatus::Optimal)
          throw SolverFailure("subproblem for day " + std::to_string(days[d].id) + " returned '" +
                              to_string(sol.status) + "'");
        std::vector<double> ld(sp.lambda_vars.size());
        for (std::size_t k = 0; k < ld.size(); ++k) ld[k] = sol.x[sp.lambda_vars[k]];
        lambda_out[d] = std::move(ld);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
      }
    }
  };

  const int width = std::min<int>(cfg.parallelism, static_cast<int>(which.size()));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (int w = 0; w < width; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failed.load()) throw SolverFailure(failure);
}

PHResult run_consensus(const Grid& grid, const std::vector<ScenarioDay>& days, const PHConfig& cfg,
                       const PHObserver& observer, bool push_forward) {
  if (days.empty()) throw DataError("consensus training needs at least one day");
  cfg.validate(static_cast<int>(days.size()));
  const int D = static_cast<int>(days.size());
  const int K = days.front().providers();
  for (const ScenarioDay& d : days)
    if (d.providers() != K) throw DimensionError("provider count differs across days");
  const int d_prime = push_forward
                          ? (cfg.active_set > 0 ? cfg.active_set : (D + 2) / 3)
                          : D;

  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  PHState st;
  st.lambda.assign(D, std::vector<double>(K, 0.0));
  st.mu.assign(D, std::vector<double>(K, 0.0));
  long solves = 0;

  // Initialization: per-day optimal weights with no coupling terms.
  {
    std::vector<int> all(D);
    std::iota(all.begin(), all.end(), 0);
    const std::vector<double> zero(K, 0.0);
    const std::vector<std::vector<double>> zero_mu(D, zero);
    solve_days(grid, days, all, zero_mu, 0.0, zero, cfg, st.lambda);
    solves += D;
  }
  st.lambda_bar = day_average(st.lambda, K);
  for (int d = 0; d < D; ++d)
    for (int k = 0; k < K; ++k) st.mu[d][k] = cfg.rho * (st.lambda[d][k] - st.lambda_bar[k]);
  st.tau = 0;
  st.gap = consensus_gap(st.lambda, st.lambda_bar);
  st.trace.push_back(PHTraceRow{0, st.lambda_bar, st.gap, D, solves, elapsed()});
  if (observer) observer(st);

  bool converged = false;
  while (st.tau < cfg.max_iter) {
    std::vector<int> resolve;
    if (push_forward) {
      auto [active, stale] = select_active_set(st.lambda, st.lambda_bar, d_prime);
      resolve = std::move(active);
      (void)stale;  // stale days carry their previous weights forward
    } else {
      resolve.resize(D);
      std::iota(resolve.begin(), resolve.end(), 0);
    }

    const std::vector<std::vector<double>> mu_prev = st.mu;
    const std::vector<double> bar_prev = st.lambda_bar;
    solve_days(grid, days, resolve, mu_prev, cfg.rho, bar_prev, cfg, st.lambda);
    solves += static_cast<long>(resolve.size());

    st.lambda_bar = day_average(st.lambda, K);
    st.mu = update_multipliers(mu_prev, cfg.rho, st.lambda, st.lambda_bar);
    st.gap = consensus_gap(st.lambda, st.lambda_bar);
    ++st.tau;
    st.trace.push_back(PHTraceRow{st.tau, st.lambda_bar, st.gap,
                                  static_cast<int>(resolve.size()), solves, elapsed()});
    if (observer) observer(st);
    if (st.gap < cfg.eps) {
      converged = true;
      break;
    }
  }

  PHResult res{Weights::uniform(K), converged, st.tau, solves, elapsed(), {}, {}};
  double drift = 0.0;
  res.lambda = Weights::renormalized(st.lambda_bar, &drift);
  if (drift > 1e-7)
    res.warnings.push_back("final average weights renormalized; drift " + fmt_full(drift));
  if (!converged)
    res.warnings.push_back("stopped at max_iter=" + std::to_string(cfg.max_iter) +
                           " with consensus gap " + fmt_full(st.gap));
  res.state = std::move(st);
  return res;
}

}  // namespace

PHResult run_ph(const Grid& grid, const std::vector<ScenarioDay>& days, const PHConfig& cfg,
                const PHObserver& observer) {
  return run_consensus(grid, days, cfg, observer, /*push_forward=*/false);
}

PHResult run_pfph(const Grid& grid, const std::vector<ScenarioDay>& days, const PHConfig& cfg,
                  const PHObserver& observer) {
  return run_consensus(grid, days, cfg, observer, /*push_forward=*/true);
}

void write_trace_csv(const std::vector<PHTraceRow>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const int K = trace.empty() ? 0 : static_cast<int>(trace.front().lambda_bar.size());
  out << "tau";
  for (int k = 0; k < K; ++k) out << ",lambda_bar_" << (k + 1);
  out << ",gap,active_set,cum_solves\n";
  for (const PHTraceRow& r : trace) {
    out << r.tau;
    for (double v : r.lambda_bar) out << "," << fmt_full(v);
    out << "," << fmt_full(r.gap) << "," << r.active << "," << r.cum_solves << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_timing_csv(const std::vector<PHTraceRow>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "tau,wall_s\n";
  for (const PHTraceRow& r : trace) out << r.tau << "," << fmt_full(r.wall_s) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace vfc
