#include "vfc/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "vfc/errors.hpp"

namespace vfc {

namespace {

// Interval bounds of a variable: block natural ranges where recorded,
// declared bounds otherwise.
struct RangeTable {
  std::map<int, std::pair<double, double>> natural;
  const ModelInstance* model = nullptr;

  std::pair<double, double> range(int var) const {
    auto it = natural.find(var);
    if (it != natural.end()) return it->second;
    return {model->var(var).lb, model->var(var).ub};
  }
};

// Interval bounds of rhs - activity for a <= row.
std::pair<double, double> slack_range(const ModelInstance& m, int row, const RangeTable& rt) {
  const LinearConstraint& c = m.con(row);
  double act_lo = 0.0, act_hi = 0.0;
  for (std::size_t k = 0; k < c.cols.size(); ++k) {
    const auto [lo, hi] = rt.range(c.cols[k]);
    const double a = c.coefs[k];
    if (a > 0.0) {
      act_lo += a * lo;
      act_hi += a * hi;
    } else {
      act_lo += a * hi;
      act_hi += a * lo;
    }
  }
  return {c.rhs - act_hi, c.rhs - act_lo};  // {slack_lo, slack_hi}
}

}  // namespace

KKTSystem assemble_kkt(const ModelInstance& model, const UcBlock& block, const Grid& grid) {
  if (!block.bound_rows || !block.relaxed)
    throw ModelError("optimality system requires a relaxed block with explicit dual rows");
  for (const GeneratorParams& g : grid.generators)
    if (g.min_up > 1 || g.min_down > 1)
      throw UnsupportedError("single-level training supports min up/down times of 1 only; generator '" +
                             g.id + "' has min_up=" + std::to_string(g.min_up) +
                             ", min_down=" + std::to_string(g.min_down));

  KKTSystem kkt;
  kkt.eq_rows.insert(kkt.eq_rows.end(), block.balance_rows.begin(), block.balance_rows.end());
  kkt.eq_rows.insert(kkt.eq_rows.end(), block.flowdef_rows.begin(), block.flowdef_rows.end());
  kkt.eq_rows.insert(kkt.eq_rows.end(), block.ref_rows.begin(), block.ref_rows.end());
  kkt.n_balance = static_cast<int>(block.balance_rows.size());
  kkt.n_flowdef = static_cast<int>(block.flowdef_rows.size());
  kkt.n_ref = static_cast<int>(block.ref_rows.size());

  RangeTable ranges;
  ranges.model = &model;
  for (std::size_t k = 0; k < block.nb_var.size(); ++k)
    ranges.natural[block.nb_var[k]] = {block.nb_lo[k], block.nb_hi[k]};

  kkt.ineqs.reserve(block.ineq_rows.size());
  for (const UcBlockRow& br : block.ineq_rows) {
    if (model.con(br.row).sense != Sense::LessEqual)
      throw ModelError("optimality system expects <= inequality rows");
    KKTIneq iq;
    iq.family = br.family;
    iq.row = br.row;
    const auto [slo, shi] = slack_range(model, br.row, ranges);
    iq.slack_cap = shi;
    iq.always_tight = (shi <= 1e-9);
    iq.never_tight = (slo > 1e-9);
    kkt.ineqs.push_back(iq);
  }

  // Lower-level variables: everything the block owns (weights are upper-level
  // parameters and take no stationarity row).
  std::set<int> lower;
  for (const auto& ids : {block.p, block.u, block.y, block.flow, block.angle, block.shed, block.curtail})
    for (int id : ids)
      if (id >= 0) lower.insert(id);

  std::map<int, double> cost;
  for (const auto& [var, coef] : block.cost_terms) cost[var] += coef;

  std::map<int, KKTStationarity> rows;
  for (int v : lower) {
    KKTStationarity st;
    st.var = v;
    auto it = cost.find(v);
    st.cost = it == cost.end() ? 0.0 : it->second;
    rows[v] = std::move(st);
  }
  for (std::size_t e = 0; e < kkt.eq_rows.size(); ++e) {
    const LinearConstraint& c = model.con(kkt.eq_rows[e]);
    for (std::size_t k = 0; k < c.cols.size(); ++k) {
      auto it = rows.find(c.cols[k]);
      if (it != rows.end()) it->second.eq_terms.emplace_back(static_cast<int>(e), c.coefs[k]);
    }
  }
  for (std::size_t q = 0; q < kkt.ineqs.size(); ++q) {
    const LinearConstraint& c = model.con(kkt.ineqs[q].row);
    for (std::size_t k = 0; k < c.cols.size(); ++k) {
      auto it = rows.find(c.cols[k]);
      if (it != rows.end()) it->second.ineq_terms.emplace_back(static_cast<int>(q), c.coefs[k]);
    }
  }
  kkt.stationarity.reserve(rows.size());
  for (auto& [v, st] : rows) kkt.stationarity.push_back(std::move(st));
  return kkt;
}

KKTResiduals kkt_residuals(const ModelInstance& model, const KKTSystem& kkt,
                           const std::vector<double>& x, const std::vector<double>& nu,
                           const std::vector<double>& psi) {
  if (nu.size() != kkt.eq_rows.size() || psi.size() != kkt.ineqs.size())
    throw DimensionError("optimality residuals: dual vector sizes do not match the system");
  KKTResiduals res;
  for (const KKTStationarity& st : kkt.stationarity) {
    double v = st.cost;
    for (const auto& [e, a] : st.eq_terms) v += a * nu[e];
    for (const auto& [q, a] : st.ineq_terms) v += a * psi[q];
    res.stationarity = std::max(res.stationarity, std::abs(v));
  }
  for (std::size_t q = 0; q < kkt.ineqs.size(); ++q) {
    const double slack = model.con(kkt.ineqs[q].row).rhs - model.row_activity(kkt.ineqs[q].row, x);
    res.complementarity = std::max(res.complementarity, std::abs(psi[q] * slack));
    res.dual_sign = std::max(res.dual_sign, -psi[q]);
  }
  return res;
}

void duals_from_lp(const ModelInstance& model, const KKTSystem& kkt, const Solution& sol,
                   std::vector<double>& nu, std::vector<double>& psi) {
  (void)model;
  nu.resize(kkt.eq_rows.size());
  psi.resize(kkt.ineqs.size());
  // Row duals satisfy c = A'y + z; the Lagrangian form c + A'nu + A'psi = 0
  // used here flips the sign.
  for (std::size_t e = 0; e < kkt.eq_rows.size(); ++e) nu[e] = -sol.row_dual[kkt.eq_rows[e]];
  for (std::size_t q = 0; q < kkt.ineqs.size(); ++q) psi[q] = -sol.row_dual[kkt.ineqs[q].row];
}

BuiltStm build_stm(const Grid& grid, const std::vector<ScenarioDay>& days, const STMConfig& cfg) {
  if (days.empty()) throw DataError("single-level training needs at least one day");
  const int K = days.front().providers();
  for (const ScenarioDay& d : days) {
    d.validate(grid.num_nodes());
    if (d.providers() != K) throw DimensionError("provider count differs across days");
  }

  BuiltStm stm;
  ModelInstance& m = stm.model;

  double big_m = cfg.big_m;
  if (big_m <= 0.0) {
    double max_cost = 1.0, max_cap = 1.0;
    for (const GeneratorParams& g : grid.generators) {
      max_cost = std::max({max_cost, g.cost, g.startup_cost, g.shutdown_cost, g.up_cost, g.down_cost});
      max_cap = std::max(max_cap, g.p_max);
    }
    for (const NodeParams& n : grid.nodes) max_cost = std::max({max_cost, n.shed_cost, n.curtail_cost});
    for (const LineParams& l : grid.lines) max_cap = std::max(max_cap, l.capacity);
    for (const ScenarioDay& d : days)
      for (int k = 0; k < K; ++k)
        for (double v : d.fc_net_load[k].v) max_cap = std::max(max_cap, std::abs(v));
    big_m = 10.0 * max_cost * max_cap;
  }
  stm.big_m = big_m;

  for (int k = 0; k < K; ++k)
    stm.lambda_vars.push_back(
        m.add_variable("lambda_" + std::to_string(k + 1), cfg.lambda_lo, cfg.lambda_hi));
  m.add_constraint("simplex", stm.lambda_vars, std::vector<double>(K, 1.0), Sense::Equal, 1.0);

  const double scale = 1.0 / static_cast<double>(days.size());
  for (const ScenarioDay& day : days) {
    StmDayBlock db;
    db.day_id = day.id;
    const std::string tag = "_d" + std::to_string(day.id);

    LambdaForecast lf;
    lf.lambda_vars = stm.lambda_vars;
    lf.net_load = &day.fc_net_load;
    lf.wind = &day.fc_wind;
    UcBlockOptions uopt;
    uopt.variant = UcVariant::Relaxed;
    uopt.bound_rows = true;
    uopt.tag = tag;
    db.uc = add_uc_block(m, grid, day.horizon, nullptr, nullptr, &lf, uopt);
    db.kkt = assemble_kkt(m, db.uc, grid);

    for (std::size_t e = 0; e < db.kkt.eq_rows.size(); ++e)
      db.kkt.nu_vars.push_back(
          m.add_variable("nu_" + m.con(db.kkt.eq_rows[e]).name, -kInf, kInf));

    for (KKTIneq& iq : db.kkt.ineqs) {
      const std::string& rn = m.con(iq.row).name;
      if (iq.never_tight) {
        iq.psi = m.add_variable("psi_" + rn, 0.0, 0.0);  // slack can never bind
        continue;
      }
      iq.psi = m.add_variable("psi_" + rn, 0.0, big_m);
      if (iq.always_tight) continue;  // complementarity holds for free
      iq.z = m.add_variable("z_" + rn, 0.0, 1.0, true);
      m.add_constraint("bm_psi_" + rn, {iq.psi, iq.z}, {1.0, -big_m}, Sense::LessEqual, 0.0);
      // slack <= M_r (1 - z), with M_r tightened by the interval bound.
      const double mr = std::min(big_m, iq.slack_cap);
      const LinearConstraint& row = m.con(iq.row);
      std::vector<int> cols = row.cols;
      std::vector<double> coefs;
      coefs.reserve(row.coefs.size() + 1);
      for (double a : row.coefs) coefs.push_back(-a);
      cols.push_back(iq.z);
      coefs.push_back(mr);
      m.add_constraint("bm_slk_" + rn, std::move(cols), std::move(coefs), Sense::LessEqual,
                       mr - row.rhs);
    }

    for (KKTStationarity& st : db.kkt.stationarity) {
      std::vector<int> cols;
      std::vector<double> coefs;
      for (const auto& [e, a] : st.eq_terms) {
        cols.push_back(db.kkt.nu_vars[e]);
        coefs.push_back(a);
      }
      for (const auto& [q, a] : st.ineq_terms) {
        cols.push_back(db.kkt.ineqs[q].psi);
        coefs.push_back(a);
      }
      st.row = m.add_constraint("st_" + m.var(st.var).name, std::move(cols), std::move(coefs),
                                Sense::Equal, -st.cost);
    }

    db.rt = add_rt_block(m, grid, day.net_load, day.wind, nullptr, &db.uc, tag);
    for (const auto& [var, coef] : db.uc.cost_terms) m.add_objective(var, scale * coef);
    for (const auto& [var, coef] : db.rt.cost_terms) m.add_objective(var, scale * coef);

    stm.days.push_back(std::move(db));
    if (m.num_vars() > cfg.max_model_vars)
      throw UnsupportedError("single-level model exceeds " + std::to_string(cfg.max_model_vars) +
                             " variables: instance too large for the reference solver; export it "
                             "for an external solver instead");
  }
  return stm;
}

BigMReport validate_bigm(const BuiltStm& stm, const Solution& sol, double threshold) {
  BigMReport rep;
  const double limit = threshold * stm.big_m;
  for (const StmDayBlock& db : stm.days) {
    for (const KKTIneq& iq : db.kkt.ineqs) {
      if (iq.never_tight) continue;
      const double psi = sol.x[iq.psi];
      if (psi >= limit) {
        rep.clean = false;
        rep.flags.push_back({db.day_id, stm.model.con(iq.row).name, "dual", psi, stm.big_m});
      }
      if (iq.z >= 0) {
        const double slack = stm.model.con(iq.row).rhs - stm.model.row_activity(iq.row, sol.x);
        const double mr = std::min(stm.big_m, iq.slack_cap);
        // A slack pinned against the configured constant (not against a
        // bound proven valid by interval reasoning) means M may bind.
        if (mr >= stm.big_m - 1e-12 && slack >= limit) {
          rep.clean = false;
          rep.flags.push_back({db.day_id, stm.model.con(iq.row).name, "slack", slack, stm.big_m});
        }
      }
    }
  }
  return rep;
}

KKTResiduals stm_residuals(const BuiltStm& stm, const Solution& sol) {
  KKTResiduals worst;
  for (const StmDayBlock& db : stm.days) {
    std::vector<double> nu(db.kkt.eq_rows.size()), psi(db.kkt.ineqs.size());
    for (std::size_t e = 0; e < nu.size(); ++e) nu[e] = sol.x[db.kkt.nu_vars[e]];
    for (std::size_t q = 0; q < psi.size(); ++q) psi[q] = sol.x[db.kkt.ineqs[q].psi];
    const KKTResiduals r = kkt_residuals(stm.model, db.kkt, sol.x, nu, psi);
    worst.stationarity = std::max(worst.stationarity, r.stationarity);
    worst.complementarity = std::max(worst.complementarity, r.complementarity);
    worst.dual_sign = std::max(worst.dual_sign, r.dual_sign);
  }
  return worst;
}

double stm_day_stage1_cost(const BuiltStm& stm, int day_index, const Solution& sol) {
  double c = 0.0;
  for (const auto& [var, coef] : stm.days[day_index].uc.cost_terms) c += coef * sol.x[var];
  return c;
}

}  // namespace vfc
