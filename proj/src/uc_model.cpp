#include "vfc/uc_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vfc/errors.hpp"
#include "vfc/milp.hpp"
#include "vfc/simplex.hpp"

namespace vfc {

namespace {

std::string nm(const std::string& base, const std::string& tag) { return base + tag; }

void check_grid_ready(const Grid& grid) {
  if (grid.ref_index < 0 || grid.gens_at.size() != grid.nodes.size())
    throw DataError("grid must be finalized before building models");
}

void check_series_shape(const Series& s, const Grid& grid, int T, const std::string& what) {
  if (s.nodes != grid.num_nodes() || s.hours != T)
    throw DimensionError(what + ": expected " + std::to_string(grid.num_nodes()) + "x" +
                         std::to_string(T) + " series, got " + std::to_string(s.nodes) + "x" +
                         std::to_string(s.hours));
}

}  // namespace

const char* to_string(UcRowFamily f) {
  switch (f) {
    case UcRowFamily::Balance: return "balance";
    case UcRowFamily::FlowDef: return "flow_def";
    case UcRowFamily::RefAngle: return "ref_angle";
    case UcRowFamily::MinUp: return "min_up";
    case UcRowFamily::MinDown: return "min_down";
    case UcRowFamily::StartupDef: return "startup_def";
    case UcRowFamily::PowerMin: return "power_min";
    case UcRowFamily::PowerMax: return "power_max";
    case UcRowFamily::RampUp: return "ramp_up";
    case UcRowFamily::RampDown: return "ramp_down";
    case UcRowFamily::HullA: return "hull_a";
    case UcRowFamily::HullB: return "hull_b";
    case UcRowFamily::HullC: return "hull_c";
    case UcRowFamily::HullD: return "hull_d";
    case UcRowFamily::ULower: return "u_lower";
    case UcRowFamily::UUpper: return "u_upper";
    case UcRowFamily::YLower: return "y_lower";
    case UcRowFamily::FlowMax: return "flow_max";
    case UcRowFamily::FlowMin: return "flow_min";
    case UcRowFamily::ShedLower: return "shed_lower";
    case UcRowFamily::ShedUpper: return "shed_upper";
    case UcRowFamily::CurLower: return "cur_lower";
    case UcRowFamily::CurUpper: return "cur_upper";
  }
  return "?";
}

UcBlock add_uc_block(ModelInstance& m, const Grid& grid, int T,
                     const Series* fixed_net_load, const Series* fixed_wind,
                     const LambdaForecast* combined, const UcBlockOptions& opt) {
  check_grid_ready(grid);
  if (T < 1) throw ModelError("commitment block: nonpositive horizon");
  const bool lambda_mode = combined != nullptr;
  if (lambda_mode == (fixed_net_load != nullptr))
    throw ModelError("commitment block: exactly one forecast source required");
  if (!lambda_mode) {
    check_series_shape(*fixed_net_load, grid, T, "forecast net load");
    check_series_shape(*fixed_wind, grid, T, "forecast wind");
  } else {
    if (combined->net_load->size() != combined->lambda_vars.size() ||
        combined->wind->size() != combined->lambda_vars.size())
      throw DimensionError("commitment block: provider series count differs from weight count");
    for (const Series& s : *combined->net_load) check_series_shape(s, grid, T, "provider net load");
    for (const Series& s : *combined->wind) check_series_shape(s, grid, T, "provider wind");
  }
  if (opt.bound_rows && opt.variant != UcVariant::Relaxed)
    throw ModelError("commitment block: explicit dual rows require the relaxed variant");

  const int N = grid.num_nodes();
  const int L = grid.num_lines();
  const int G = grid.num_generators();
  const int K = lambda_mode ? static_cast<int>(combined->lambda_vars.size()) : 0;

  UcBlock blk;
  blk.G = G;
  blk.T = T;
  blk.N = N;
  blk.L = L;
  blk.relaxed = (opt.variant == UcVariant::Relaxed);
  blk.bound_rows = opt.bound_rows;
  if (lambda_mode) blk.lambda = combined->lambda_vars;

  const auto note_nb = [&](int var, double lo, double hi) {
    blk.nb_var.push_back(var);
    blk.nb_lo.push_back(lo);
    blk.nb_hi.push_back(hi);
  };

  // Combined-forecast coefficients per (i,t): net load, wind, and the convex
  // surrogate of the shed cap max{0, Lhat - What}.
  const auto prov_load = [&](int k, int i, int t) { return (*combined->net_load)[k].at(i, t); };
  const auto prov_wind = [&](int k, int i, int t) { return (*combined->wind)[k].at(i, t); };
  const auto shed_cap_k = [&](int k, int i, int t) {
    return std::max(0.0, prov_load(k, i, t) - prov_wind(k, i, t));
  };

  // --- variables ---
  blk.p.assign(G * T, -1);
  blk.u.assign(G * T, -1);
  blk.y.assign(G * T, -1);
  for (int g = 0; g < G; ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 0; t < T; ++t) {
      const std::string suf = "_" + gen.id + "_t" + std::to_string(t + 1) + opt.tag;
      if (opt.bound_rows) {
        blk.p[blk.idx_gt(g, t)] = m.add_variable(nm("p", suf), -kInf, kInf);
        blk.u[blk.idx_gt(g, t)] = m.add_variable(nm("u", suf), -kInf, kInf);
      } else {
        blk.p[blk.idx_gt(g, t)] = m.add_variable(nm("p", suf), 0.0, gen.p_max);
        // Commitment is binary from the second hour on; the first hour is a
        // continuous [0,1] decision in both variants.
        const bool integral = (opt.variant == UcVariant::Binary) && t >= 1;
        blk.u[blk.idx_gt(g, t)] = m.add_variable(nm("u", suf), 0.0, 1.0, integral);
      }
      note_nb(blk.p[blk.idx_gt(g, t)], 0.0, gen.p_max);
      note_nb(blk.u[blk.idx_gt(g, t)], 0.0, 1.0);
      if (t >= 1) {
        blk.y[blk.idx_gt(g, t)] =
            opt.bound_rows ? m.add_variable(nm("y", suf), -kInf, kInf)
                           : m.add_variable(nm("y", suf), 0.0, 1.0);
        note_nb(blk.y[blk.idx_gt(g, t)], 0.0, 1.0);
      }
    }
  }
  blk.flow.assign(L * T, -1);
  for (int l = 0; l < L; ++l)
    for (int t = 0; t < T; ++t) {
      const double cap = grid.lines[l].capacity;
      const std::string suf = "_l" + std::to_string(l + 1) + "_t" + std::to_string(t + 1) + opt.tag;
      blk.flow[blk.idx_lt(l, t)] = opt.bound_rows ? m.add_variable(nm("fhat", suf), -kInf, kInf)
                                                  : m.add_variable(nm("fhat", suf), -cap, cap);
      note_nb(blk.flow[blk.idx_lt(l, t)], -cap, cap);
    }
  blk.angle.assign(N * T, -1);
  blk.shed.assign(N * T, -1);
  blk.curtail.assign(N * T, -1);
  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      const std::string suf = "_" + grid.nodes[i].id + "_t" + std::to_string(t + 1) + opt.tag;
      blk.angle[blk.idx_it(i, t)] = m.add_variable(nm("theta", suf), -kInf, kInf);
      double shed_hi, cur_hi;
      if (lambda_mode) {
        shed_hi = 0.0;
        cur_hi = 0.0;
        for (int k = 0; k < K; ++k) {
          shed_hi = std::max(shed_hi, shed_cap_k(k, i, t));
          cur_hi = std::max(cur_hi, prov_wind(k, i, t));
        }
      } else {
        shed_hi = std::max(0.0, fixed_net_load->at(i, t) - fixed_wind->at(i, t));
        cur_hi = fixed_wind->at(i, t);
      }
      blk.shed[blk.idx_it(i, t)] = opt.bound_rows ? m.add_variable(nm("lshed", suf), -kInf, kInf)
                                                  : m.add_variable(nm("lshed", suf), 0.0, shed_hi);
      blk.curtail[blk.idx_it(i, t)] = opt.bound_rows ? m.add_variable(nm("wcur", suf), -kInf, kInf)
                                                     : m.add_variable(nm("wcur", suf), 0.0, cur_hi);
      note_nb(blk.shed[blk.idx_it(i, t)], 0.0, shed_hi);
      note_nb(blk.curtail[blk.idx_it(i, t)], 0.0, cur_hi);
    }

  // --- equalities ---
  blk.balance_rows.assign(N * T, -1);
  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      std::vector<int> cols;
      std::vector<double> coefs;
      for (int g : grid.gens_at[i]) {
        cols.push_back(blk.p[blk.idx_gt(g, t)]);
        coefs.push_back(1.0);
      }
      for (int l = 0; l < L; ++l) {
        if (grid.line_to[l] == i) {
          cols.push_back(blk.flow[blk.idx_lt(l, t)]);
          coefs.push_back(1.0);
        } else if (grid.line_from[l] == i) {
          cols.push_back(blk.flow[blk.idx_lt(l, t)]);
          coefs.push_back(-1.0);
        }
      }
      cols.push_back(blk.shed[blk.idx_it(i, t)]);
      coefs.push_back(1.0);
      double rhs = 0.0;
      if (lambda_mode) {
        for (int k = 0; k < K; ++k) {
          cols.push_back(combined->lambda_vars[k]);
          coefs.push_back(-prov_load(k, i, t));
        }
      } else {
        rhs = fixed_net_load->at(i, t);
      }
      blk.balance_rows[blk.idx_it(i, t)] = m.add_constraint(
          nm("bal_" + grid.nodes[i].id + "_t" + std::to_string(t + 1), opt.tag), std::move(cols),
          std::move(coefs), Sense::Equal, rhs);
    }

  blk.flowdef_rows.assign(L * T, -1);
  for (int l = 0; l < L; ++l)
    for (int t = 0; t < T; ++t) {
      const double B = grid.lines[l].susceptance;
      blk.flowdef_rows[blk.idx_lt(l, t)] = m.add_constraint(
          nm("flow_l" + std::to_string(l + 1) + "_t" + std::to_string(t + 1), opt.tag),
          {blk.flow[blk.idx_lt(l, t)], blk.angle[blk.idx_it(grid.line_from[l], t)],
           blk.angle[blk.idx_it(grid.line_to[l], t)]},
          {1.0, -B, B}, Sense::Equal, 0.0);
    }

  blk.ref_rows.assign(T, -1);
  for (int t = 0; t < T; ++t)
    blk.ref_rows[t] = m.add_constraint(nm("ref_t" + std::to_string(t + 1), opt.tag),
                                       {blk.angle[blk.idx_it(grid.ref_index, t)]}, {1.0},
                                       Sense::Equal, 0.0);

  // --- inequalities (all <=) ---
  const auto add_ineq = [&](UcRowFamily fam, const std::string& name, std::vector<int> cols,
                            std::vector<double> coefs, double rhs, int entity, int t1) {
    const int row = m.add_constraint(nm(name, opt.tag), std::move(cols), std::move(coefs),
                                     Sense::LessEqual, rhs);
    blk.ineq_rows.push_back(UcBlockRow{fam, row, entity, t1});
    return row;
  };

  for (int g = 0; g < G; ++g) {
    const GeneratorParams& gen = grid.generators[g];
    const std::string gid = gen.id;
    for (int t = 0; t < T; ++t) {
      const std::string ts = "_t" + std::to_string(t + 1);
      add_ineq(UcRowFamily::PowerMin, "pmin_" + gid + ts,
               {blk.u[blk.idx_gt(g, t)], blk.p[blk.idx_gt(g, t)]}, {gen.p_min, -1.0}, 0.0, g, t + 1);
      add_ineq(UcRowFamily::PowerMax, "pmax_" + gid + ts,
               {blk.p[blk.idx_gt(g, t)], blk.u[blk.idx_gt(g, t)]}, {1.0, -gen.p_max}, 0.0, g, t + 1);
    }
    // Startup windows: minimum uptime and downtime.
    for (int t1 = gen.min_up + 1; t1 <= T; ++t1) {
      std::vector<int> cols;
      std::vector<double> coefs;
      for (int i1 = t1 - gen.min_up + 1; i1 <= t1; ++i1) {
        cols.push_back(blk.y[blk.idx_gt(g, i1 - 1)]);
        coefs.push_back(1.0);
      }
      cols.push_back(blk.u[blk.idx_gt(g, t1 - 1)]);
      coefs.push_back(-1.0);
      add_ineq(UcRowFamily::MinUp, "minup_" + gid + "_t" + std::to_string(t1), std::move(cols),
               std::move(coefs), 0.0, g, t1);
    }
    for (int t1 = gen.min_down + 1; t1 <= T; ++t1) {
      std::vector<int> cols;
      std::vector<double> coefs;
      for (int i1 = t1 - gen.min_down + 1; i1 <= t1; ++i1) {
        cols.push_back(blk.y[blk.idx_gt(g, i1 - 1)]);
        coefs.push_back(1.0);
      }
      cols.push_back(blk.u[blk.idx_gt(g, t1 - 1 - gen.min_down)]);
      coefs.push_back(1.0);
      add_ineq(UcRowFamily::MinDown, "mindn_" + gid + "_t" + std::to_string(t1), std::move(cols),
               std::move(coefs), 1.0, g, t1);
    }
    for (int t = 1; t < T; ++t) {
      const std::string ts = "_t" + std::to_string(t + 1);
      add_ineq(UcRowFamily::StartupDef, "start_" + gid + ts,
               {blk.u[blk.idx_gt(g, t)], blk.u[blk.idx_gt(g, t - 1)], blk.y[blk.idx_gt(g, t)]},
               {1.0, -1.0, -1.0}, 0.0, g, t + 1);
      const double rr = gen.startup_ramp - gen.ramp;
      add_ineq(UcRowFamily::RampUp, "rampup_" + gid + ts,
               {blk.p[blk.idx_gt(g, t)], blk.p[blk.idx_gt(g, t - 1)], blk.u[blk.idx_gt(g, t - 1)]},
               {1.0, -1.0, rr}, gen.startup_ramp, g, t + 1);
      add_ineq(UcRowFamily::RampDown, "rampdn_" + gid + ts,
               {blk.p[blk.idx_gt(g, t - 1)], blk.p[blk.idx_gt(g, t)], blk.u[blk.idx_gt(g, t)]},
               {1.0, -1.0, rr}, gen.startup_ramp, g, t + 1);
    }
    if (blk.relaxed) {
      // Valid inequalities tightening the relaxed generator polytope.
      for (int t = 1; t < T; ++t) {
        const std::string ts = "_t" + std::to_string(t + 1);
        const double Pbar = gen.p_max, Pmin = gen.p_min, R = gen.ramp, Rbar = gen.startup_ramp;
        add_ineq(UcRowFamily::HullA, "hull_a_" + gid + ts,
                 {blk.p[blk.idx_gt(g, t - 1)], blk.u[blk.idx_gt(g, t - 1)], blk.u[blk.idx_gt(g, t)],
                  blk.y[blk.idx_gt(g, t)]},
                 {1.0, -Rbar, -(Pbar - Rbar), (Pbar - Rbar)}, 0.0, g, t + 1);
        add_ineq(UcRowFamily::HullB, "hull_b_" + gid + ts,
                 {blk.p[blk.idx_gt(g, t)], blk.u[blk.idx_gt(g, t)], blk.y[blk.idx_gt(g, t)]},
                 {1.0, -Pbar, (Pbar - Rbar)}, 0.0, g, t + 1);
        add_ineq(UcRowFamily::HullC, "hull_c_" + gid + ts,
                 {blk.p[blk.idx_gt(g, t)], blk.p[blk.idx_gt(g, t - 1)], blk.u[blk.idx_gt(g, t)],
                  blk.u[blk.idx_gt(g, t - 1)], blk.y[blk.idx_gt(g, t)]},
                 {1.0, -1.0, -(Pmin + R), Pmin, (Pmin + R - Rbar)}, 0.0, g, t + 1);
        add_ineq(UcRowFamily::HullD, "hull_d_" + gid + ts,
                 {blk.p[blk.idx_gt(g, t - 1)], blk.p[blk.idx_gt(g, t)], blk.u[blk.idx_gt(g, t - 1)],
                  blk.u[blk.idx_gt(g, t)], blk.y[blk.idx_gt(g, t)]},
                 {1.0, -1.0, -Rbar, (Rbar - R), (Pmin + R - Rbar)}, 0.0, g, t + 1);
      }
    }
    if (opt.bound_rows) {
      for (int t = 0; t < T; ++t) {
        const std::string ts = "_t" + std::to_string(t + 1);
        add_ineq(UcRowFamily::ULower, "u_lo_" + gid + ts, {blk.u[blk.idx_gt(g, t)]}, {-1.0}, 0.0, g, t + 1);
        // u <= 1 is implied through the downtime window wherever one exists
        // downstream; add it explicitly only for the uncovered tail hours.
        if (t + 1 > T - gen.min_down)
          add_ineq(UcRowFamily::UUpper, "u_hi_" + gid + ts, {blk.u[blk.idx_gt(g, t)]}, {1.0}, 1.0, g, t + 1);
        if (t >= 1)
          add_ineq(UcRowFamily::YLower, "y_lo_" + gid + ts, {blk.y[blk.idx_gt(g, t)]}, {-1.0}, 0.0, g, t + 1);
      }
    }
  }

  if (opt.bound_rows) {
    for (int l = 0; l < L; ++l)
      for (int t = 0; t < T; ++t) {
        const double cap = grid.lines[l].capacity;
        const std::string ls = "_l" + std::to_string(l + 1) + "_t" + std::to_string(t + 1);
        add_ineq(UcRowFamily::FlowMax, "fmax" + ls, {blk.flow[blk.idx_lt(l, t)]}, {1.0}, cap, l, t + 1);
        add_ineq(UcRowFamily::FlowMin, "fmin" + ls, {blk.flow[blk.idx_lt(l, t)]}, {-1.0}, cap, l, t + 1);
      }
  }

  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      const std::string is = "_" + grid.nodes[i].id + "_t" + std::to_string(t + 1);
      if (opt.bound_rows) {
        add_ineq(UcRowFamily::ShedLower, "shed_lo" + is, {blk.shed[blk.idx_it(i, t)]}, {-1.0}, 0.0, i, t + 1);
        add_ineq(UcRowFamily::CurLower, "cur_lo" + is, {blk.curtail[blk.idx_it(i, t)]}, {-1.0}, 0.0, i, t + 1);
      }
      if (lambda_mode) {
        std::vector<int> cols{blk.shed[blk.idx_it(i, t)]};
        std::vector<double> coefs{1.0};
        for (int k = 0; k < K; ++k) {
          cols.push_back(combined->lambda_vars[k]);
          coefs.push_back(-shed_cap_k(k, i, t));
        }
        add_ineq(UcRowFamily::ShedUpper, "shed_hi" + is, std::move(cols), std::move(coefs), 0.0, i, t + 1);
        std::vector<int> wcols{blk.curtail[blk.idx_it(i, t)]};
        std::vector<double> wcoefs{1.0};
        for (int k = 0; k < K; ++k) {
          wcols.push_back(combined->lambda_vars[k]);
          wcoefs.push_back(-prov_wind(k, i, t));
        }
        add_ineq(UcRowFamily::CurUpper, "cur_hi" + is, std::move(wcols), std::move(wcoefs), 0.0, i, t + 1);
      } else if (opt.bound_rows) {
        add_ineq(UcRowFamily::ShedUpper, "shed_hi" + is, {blk.shed[blk.idx_it(i, t)]}, {1.0},
                 std::max(0.0, fixed_net_load->at(i, t) - fixed_wind->at(i, t)), i, t + 1);
        add_ineq(UcRowFamily::CurUpper, "cur_hi" + is, {blk.curtail[blk.idx_it(i, t)]}, {1.0},
                 fixed_wind->at(i, t), i, t + 1);
      }
    }

  // --- stage-one cost terms ---
  for (int g = 0; g < G; ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 0; t < T; ++t) blk.cost_terms.emplace_back(blk.p[blk.idx_gt(g, t)], gen.cost);
    for (int t = 1; t < T; ++t) {
      blk.cost_terms.emplace_back(blk.y[blk.idx_gt(g, t)], gen.startup_cost + gen.shutdown_cost);
      blk.cost_terms.emplace_back(blk.u[blk.idx_gt(g, t - 1)], gen.shutdown_cost);
      blk.cost_terms.emplace_back(blk.u[blk.idx_gt(g, t)], -gen.shutdown_cost);
    }
  }
  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      blk.cost_terms.emplace_back(blk.shed[blk.idx_it(i, t)], grid.nodes[i].shed_cost);
      blk.cost_terms.emplace_back(blk.curtail[blk.idx_it(i, t)], grid.nodes[i].curtail_cost);
    }

  return blk;
}

RtBlock add_rt_block(ModelInstance& m, const Grid& grid, const Series& net_load,
                     const Series& wind, const UcSolution* fixed_schedule,
                     const UcBlock* schedule_vars, const std::string& tag) {
  check_grid_ready(grid);
  if ((fixed_schedule != nullptr) == (schedule_vars != nullptr))
    throw ModelError("real-time block: exactly one schedule source required");
  const int T = fixed_schedule ? fixed_schedule->horizon : schedule_vars->T;
  check_series_shape(net_load, grid, T, "realized net load");
  check_series_shape(wind, grid, T, "realized wind");
  if (fixed_schedule &&
      (fixed_schedule->generators != grid.num_generators() || fixed_schedule->nodes != grid.num_nodes()))
    throw DimensionError("real-time block: schedule dimensions do not match grid");

  const int N = grid.num_nodes();
  const int L = grid.num_lines();
  const int G = grid.num_generators();

  RtBlock blk;
  blk.G = G;
  blk.T = T;
  blk.N = N;
  blk.L = L;

  const auto pstar = [&](int g, int t) { return fixed_schedule->pv(g, t); };
  const auto ustar = [&](int g, int t) { return fixed_schedule->uv(g, t); };

  blk.r_up.assign(G * T, -1);
  blk.r_dn.assign(G * T, -1);
  for (int g = 0; g < G; ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 0; t < T; ++t) {
      const std::string suf = "_" + gen.id + "_t" + std::to_string(t + 1) + tag;
      blk.r_up[blk.idx_gt(g, t)] = m.add_variable(nm("rup", suf), 0.0, gen.ramp);
      blk.r_dn[blk.idx_gt(g, t)] = m.add_variable(nm("rdn", suf), 0.0, gen.ramp);
    }
  }
  blk.flow.assign(L * T, -1);
  for (int l = 0; l < L; ++l)
    for (int t = 0; t < T; ++t)
      blk.flow[blk.idx_lt(l, t)] =
          m.add_variable(nm("f_l" + std::to_string(l + 1) + "_t" + std::to_string(t + 1), tag),
                         -grid.lines[l].capacity, grid.lines[l].capacity);
  blk.angle.assign(N * T, -1);
  blk.shed.assign(N * T, -1);
  blk.curtail.assign(N * T, -1);
  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      const std::string suf = "_" + grid.nodes[i].id + "_t" + std::to_string(t + 1) + tag;
      blk.angle[blk.idx_it(i, t)] = m.add_variable(nm("rt_theta", suf), -kInf, kInf);
      blk.shed[blk.idx_it(i, t)] = m.add_variable(
          nm("rt_lshed", suf), 0.0, std::max(0.0, net_load.at(i, t) - wind.at(i, t)));
      blk.curtail[blk.idx_it(i, t)] = m.add_variable(nm("rt_wcur", suf), 0.0, wind.at(i, t));
    }

  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      std::vector<int> cols;
      std::vector<double> coefs;
      double rhs = net_load.at(i, t);
      for (int g : grid.gens_at[i]) {
        cols.push_back(blk.r_up[blk.idx_gt(g, t)]);
        coefs.push_back(1.0);
        cols.push_back(blk.r_dn[blk.idx_gt(g, t)]);
        coefs.push_back(-1.0);
        if (fixed_schedule) {
          rhs -= pstar(g, t);
        } else {
          cols.push_back(schedule_vars->p[schedule_vars->idx_gt(g, t)]);
          coefs.push_back(1.0);
        }
      }
      for (int l = 0; l < L; ++l) {
        if (grid.line_to[l] == i) {
          cols.push_back(blk.flow[blk.idx_lt(l, t)]);
          coefs.push_back(1.0);
        } else if (grid.line_from[l] == i) {
          cols.push_back(blk.flow[blk.idx_lt(l, t)]);
          coefs.push_back(-1.0);
        }
      }
      cols.push_back(blk.shed[blk.idx_it(i, t)]);
      coefs.push_back(1.0);
      m.add_constraint(nm("rt_bal_" + grid.nodes[i].id + "_t" + std::to_string(t + 1), tag),
                       std::move(cols), std::move(coefs), Sense::Equal, rhs);
    }

  for (int l = 0; l < L; ++l)
    for (int t = 0; t < T; ++t)
      m.add_constraint(nm("rt_flow_l" + std::to_string(l + 1) + "_t" + std::to_string(t + 1), tag),
                       {blk.flow[blk.idx_lt(l, t)], blk.angle[blk.idx_it(grid.line_from[l], t)],
                        blk.angle[blk.idx_it(grid.line_to[l], t)]},
                       {1.0, -grid.lines[l].susceptance, grid.lines[l].susceptance}, Sense::Equal, 0.0);

  for (int t = 0; t < T; ++t)
    m.add_constraint(nm("rt_ref_t" + std::to_string(t + 1), tag),
                     {blk.angle[blk.idx_it(grid.ref_index, t)]}, {1.0}, Sense::Equal, 0.0);

  for (int g = 0; g < G; ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 0; t < T; ++t) {
      const std::string ts = "_" + gen.id + "_t" + std::to_string(t + 1) + tag;
      const int ru = blk.r_up[blk.idx_gt(g, t)];
      const int rd = blk.r_dn[blk.idx_gt(g, t)];
      if (fixed_schedule) {
        m.add_constraint(nm("rt_pmax", ts), {ru, rd}, {1.0, -1.0}, Sense::LessEqual,
                         gen.p_max * ustar(g, t) - pstar(g, t));
        m.add_constraint(nm("rt_pmin", ts), {rd, ru}, {1.0, -1.0}, Sense::LessEqual,
                         pstar(g, t) - gen.p_min * ustar(g, t));
      } else {
        const int pv = schedule_vars->p[schedule_vars->idx_gt(g, t)];
        const int uv = schedule_vars->u[schedule_vars->idx_gt(g, t)];
        m.add_constraint(nm("rt_pmax", ts), {pv, ru, rd, uv}, {1.0, 1.0, -1.0, -gen.p_max},
                         Sense::LessEqual, 0.0);
        m.add_constraint(nm("rt_pmin", ts), {uv, pv, ru, rd}, {gen.p_min, -1.0, -1.0, 1.0},
                         Sense::LessEqual, 0.0);
      }
    }
    for (int t = 1; t < T; ++t) {
      const std::string ts = "_" + gen.id + "_t" + std::to_string(t + 1) + tag;
      const double rr = gen.startup_ramp - gen.ramp;
      const int ru1 = blk.r_up[blk.idx_gt(g, t)];
      const int rd1 = blk.r_dn[blk.idx_gt(g, t)];
      const int ru0 = blk.r_up[blk.idx_gt(g, t - 1)];
      const int rd0 = blk.r_dn[blk.idx_gt(g, t - 1)];
      if (fixed_schedule) {
        const double up_rhs = gen.ramp * ustar(g, t - 1) + gen.startup_ramp * (1.0 - ustar(g, t - 1)) -
                              pstar(g, t) + pstar(g, t - 1);
        m.add_constraint(nm("rt_rampup", ts), {ru1, rd1, ru0, rd0}, {1.0, -1.0, -1.0, 1.0},
                         Sense::LessEqual, up_rhs);
        const double dn_rhs = gen.ramp * ustar(g, t) + gen.startup_ramp * (1.0 - ustar(g, t)) -
                              pstar(g, t - 1) + pstar(g, t);
        m.add_constraint(nm("rt_rampdn", ts), {ru0, rd0, ru1, rd1}, {1.0, -1.0, -1.0, 1.0},
                         Sense::LessEqual, dn_rhs);
      } else {
        const int p1 = schedule_vars->p[schedule_vars->idx_gt(g, t)];
        const int p0 = schedule_vars->p[schedule_vars->idx_gt(g, t - 1)];
        const int u1 = schedule_vars->u[schedule_vars->idx_gt(g, t)];
        const int u0 = schedule_vars->u[schedule_vars->idx_gt(g, t - 1)];
        m.add_constraint(nm("rt_rampup", ts), {p1, ru1, rd1, p0, ru0, rd0, u0},
                         {1.0, 1.0, -1.0, -1.0, -1.0, 1.0, rr}, Sense::LessEqual, gen.startup_ramp);
        m.add_constraint(nm("rt_rampdn", ts), {p0, ru0, rd0, p1, ru1, rd1, u1},
                         {1.0, 1.0, -1.0, -1.0, -1.0, 1.0, rr}, Sense::LessEqual, gen.startup_ramp);
      }
    }
  }

  for (int g = 0; g < G; ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 0; t < T; ++t) {
      blk.cost_terms.emplace_back(blk.r_up[blk.idx_gt(g, t)], gen.up_cost);
      blk.cost_terms.emplace_back(blk.r_dn[blk.idx_gt(g, t)], gen.down_cost);
    }
  }
  for (int i = 0; i < N; ++i)
    for (int t = 0; t < T; ++t) {
      blk.cost_terms.emplace_back(blk.shed[blk.idx_it(i, t)], grid.nodes[i].shed_cost);
      blk.cost_terms.emplace_back(blk.curtail[blk.idx_it(i, t)], grid.nodes[i].curtail_cost);
    }

  return blk;
}

BuiltUc build_uc(const Grid& grid, const Series& net_load, const Series& wind, int T) {
  BuiltUc out;
  UcBlockOptions opt;
  opt.variant = UcVariant::Binary;
  out.block = add_uc_block(out.model, grid, T, &net_load, &wind, nullptr, opt);
  for (const auto& [var, coef] : out.block.cost_terms) out.model.add_objective(var, coef);
  return out;
}

BuiltUc build_ucr(const Grid& grid, const Series& net_load, const Series& wind, int T) {
  BuiltUc out;
  UcBlockOptions opt;
  opt.variant = UcVariant::Relaxed;
  out.block = add_uc_block(out.model, grid, T, &net_load, &wind, nullptr, opt);
  for (const auto& [var, coef] : out.block.cost_terms) out.model.add_objective(var, coef);
  return out;
}

BuiltRt build_rt(const Grid& grid, const UcSolution& uc_sol, const Series& net_load,
                 const Series& wind, int T) {
  if (uc_sol.horizon != T) throw DimensionError("real-time build: schedule horizon differs from T");
  BuiltRt out;
  out.block = add_rt_block(out.model, grid, net_load, wind, &uc_sol, nullptr, "");
  for (const auto& [var, coef] : out.block.cost_terms) out.model.add_objective(var, coef);
  return out;
}

std::pair<Series, Series> combine_forecasts(const Weights& weights, const ScenarioDay& day) {
  if (weights.size() != day.providers())
    throw DimensionError("combine: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(day.providers()) + " providers");
  const int N = day.net_load.nodes;
  const int T = day.horizon;
  Series load(N, T), wind(N, T);
  for (int k = 0; k < weights.size(); ++k) {
    const double w = weights[k];
    for (std::size_t idx = 0; idx < load.v.size(); ++idx) {
      load.v[idx] += w * day.fc_net_load[k].v[idx];
      wind.v[idx] += w * day.fc_wind[k].v[idx];
    }
  }
  return {std::move(load), std::move(wind)};
}

UcSolution extract_uc_solution(const UcBlock& block, const Solution& sol) {
  UcSolution out;
  out.generators = block.G;
  out.horizon = block.T;
  out.nodes = block.N;
  out.lines = block.L;
  const auto grab = [&](const std::vector<int>& ids) {
    std::vector<double> v(ids.size(), 0.0);
    for (std::size_t k = 0; k < ids.size(); ++k) v[k] = ids[k] >= 0 ? sol.x[ids[k]] : 0.0;
    return v;
  };
  out.p = grab(block.p);
  out.u = grab(block.u);
  out.y = grab(block.y);
  out.flow = grab(block.flow);
  out.angle = grab(block.angle);
  out.shed = grab(block.shed);
  out.curtail = grab(block.curtail);
  double obj = 0.0;
  for (const auto& [var, coef] : block.cost_terms) obj += coef * sol.x[var];
  out.objective = obj;
  return out;
}

RtSolutionValues extract_rt_solution(const RtBlock& block, const Solution& sol) {
  RtSolutionValues out;
  out.G = block.G;
  out.T = block.T;
  out.N = block.N;
  out.L = block.L;
  const auto grab = [&](const std::vector<int>& ids) {
    std::vector<double> v(ids.size(), 0.0);
    for (std::size_t k = 0; k < ids.size(); ++k) v[k] = ids[k] >= 0 ? sol.x[ids[k]] : 0.0;
    return v;
  };
  out.r_up = grab(block.r_up);
  out.r_dn = grab(block.r_dn);
  out.flow = grab(block.flow);
  out.angle = grab(block.angle);
  out.shed = grab(block.shed);
  out.curtail = grab(block.curtail);
  double obj = 0.0;
  for (const auto& [var, coef] : block.cost_terms) obj += coef * sol.x[var];
  out.objective = obj;
  return out;
}

CostBreakdown two_stage_cost(const Grid& grid, const Weights& weights, const ScenarioDay& day,
                             UcVariant variant, const SolveOptions& opt) {
  day.validate(grid.num_nodes());
  auto [load, wind] = combine_forecasts(weights, day);
  BuiltUc uc = (variant == UcVariant::Binary) ? build_uc(grid, load, wind, day.horizon)
                                              : build_ucr(grid, load, wind, day.horizon);
  const Solution us = solve_model(uc.model, opt);
  if (us.status != SolveStatus::Optimal)
    throw SolverFailure("stage-one commitment solve returned '" + std::string(to_string(us.status)) +
                        "' on day " + std::to_string(day.id) +
                        " (the formulation is feasible by construction; this indicates a bug)");
  const UcSolution usol = extract_uc_solution(uc.block, us);

  BuiltRt rt = build_rt(grid, usol, day.net_load, day.wind, day.horizon);
  const Solution rs = solve_lp(rt.model, opt);
  if (rs.status != SolveStatus::Optimal)
    throw SolverFailure("real-time solve returned '" + std::string(to_string(rs.status)) +
                        "' on day " + std::to_string(day.id) +
                        " (the formulation is feasible by construction; this indicates a bug)");
  const RtSolutionValues rsol = extract_rt_solution(rt.block, rs);

  CostBreakdown cb;
  const int T = day.horizon;
  for (int g = 0; g < grid.num_generators(); ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 0; t < T; ++t) {
      cb.production += gen.cost * usol.pv(g, t);
      cb.rt_up += gen.up_cost * rsol.r_up[g * T + t];
      cb.rt_down += gen.down_cost * rsol.r_dn[g * T + t];
      if (t >= 1) {
        cb.startup += gen.startup_cost * usol.yv(g, t);
        cb.shutdown += gen.shutdown_cost * (usol.uv(g, t - 1) - usol.uv(g, t) + usol.yv(g, t));
      }
    }
  }
  for (int i = 0; i < grid.num_nodes(); ++i)
    for (int t = 0; t < T; ++t) {
      cb.fc_shed += grid.nodes[i].shed_cost * usol.shed[i * T + t];
      cb.fc_curtail += grid.nodes[i].curtail_cost * usol.curtail[i * T + t];
      cb.rt_shed += grid.nodes[i].shed_cost * rsol.shed[i * T + t];
      cb.rt_curtail += grid.nodes[i].curtail_cost * rsol.curtail[i * T + t];
    }
  // Tolerate solver-tolerance noise but surface genuinely negative components.
  for (double* c : {&cb.production, &cb.startup, &cb.shutdown, &cb.fc_shed, &cb.fc_curtail,
                    &cb.rt_up, &cb.rt_down, &cb.rt_shed, &cb.rt_curtail}) {
    if (*c < -1e-6) throw SolverFailure("negative cost component in two-stage evaluation");
    if (*c < 0.0) *c = 0.0;
  }
  cb.total = cb.uc_cost() + cb.rt_cost();
  return cb;
}

double max_balance_residual(const Grid& grid, const Series& net_load, const UcSolution& sol) {
  double worst = 0.0;
  const int T = sol.horizon;
  for (int i = 0; i < grid.num_nodes(); ++i)
    for (int t = 0; t < T; ++t) {
      double lhs = 0.0;
      for (int g : grid.gens_at[i]) lhs += sol.pv(g, t);
      for (int l = 0; l < grid.num_lines(); ++l) {
        if (grid.line_to[l] == i) lhs += sol.flow[l * T + t];
        else if (grid.line_from[l] == i) lhs -= sol.flow[l * T + t];
      }
      worst = std::max(worst, std::abs(lhs - (net_load.at(i, t) - sol.shed[i * T + t])));
    }
  return worst;
}

double max_flow_residual(const Grid& grid, const UcSolution& sol) {
  double worst = 0.0;
  const int T = sol.horizon;
  for (int l = 0; l < grid.num_lines(); ++l)
    for (int t = 0; t < T; ++t) {
      const double expect = grid.lines[l].susceptance *
                            (sol.angle[grid.line_from[l] * T + t] - sol.angle[grid.line_to[l] * T + t]);
      worst = std::max(worst, std::abs(sol.flow[l * T + t] - expect));
    }
  for (int t = 0; t < T; ++t) worst = std::max(worst, std::abs(sol.angle[grid.ref_index * T + t]));
  return worst;
}

double commitment_logic_violation(const Grid& grid, const UcSolution& sol) {
  double worst = 0.0;
  const int T = sol.horizon;
  for (int g = 0; g < grid.num_generators(); ++g) {
    const GeneratorParams& gen = grid.generators[g];
    for (int t = 1; t < T; ++t)
      worst = std::max(worst, sol.uv(g, t) - sol.uv(g, t - 1) - sol.yv(g, t));
    for (int t1 = gen.min_up + 1; t1 <= T; ++t1) {
      double win = 0.0;
      for (int i1 = t1 - gen.min_up + 1; i1 <= t1; ++i1) win += sol.yv(g, i1 - 1);
      worst = std::max(worst, win - sol.uv(g, t1 - 1));
    }
    for (int t1 = gen.min_down + 1; t1 <= T; ++t1) {
      double win = 0.0;
      for (int i1 = t1 - gen.min_down + 1; i1 <= t1; ++i1) win += sol.yv(g, i1 - 1);
      worst = std::max(worst, win + sol.uv(g, t1 - 1 - gen.min_down) - 1.0);
    }
  }
  return worst;
}

}  // namespace vfc
