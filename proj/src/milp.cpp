#include "vfc/milp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <vector>

#include "vfc/errors.hpp"
#include "vfc/simplex.hpp"

namespace vfc {

namespace {

struct Node {
  int parent = -1;
  int var = -1;         // branched variable (-1 for root)
  double lb = 0.0;      // bound override introduced at this node
  double ub = 0.0;
  double bound = -kInf; // parent LP objective
};

// min-heap ordered by (bound, sequence)
using HeapEntry = std::tuple<double, long, int>;

}  // namespace

Solution solve_milp(const ModelInstance& model, const SolveOptions& opt) {
  model.validate();
  if (!model.has_integers()) {
    Solution s = solve_lp(model, opt);
    s.nodes = 1;
    return s;
  }

  const int n = model.num_vars();
  std::vector<int> int_vars;
  for (int j = 0; j < n; ++j)
    if (model.var(j).integer) int_vars.push_back(j);

  std::vector<double> base_lb(n), base_ub(n);
  for (int j = 0; j < n; ++j) {
    base_lb[j] = model.var(j).lb;
    base_ub[j] = model.var(j).ub;
  }

  std::vector<Node> nodes;
  nodes.push_back(Node{});
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> open;
  long seq = 0;
  open.emplace(-kInf, seq++, 0);

  double incumbent_obj = kInf;
  std::vector<double> incumbent_x;
  long processed = 0;
  long total_iters = 0;
  bool hit_node_limit = false;
  bool root_unbounded = false;

  std::vector<double> lb(n), ub(n);
  std::vector<int> chain;
  while (!open.empty()) {
    const auto [bound, s, idx] = open.top();
    open.pop();
    if (bound >= incumbent_obj - opt.mip_abs_gap) break;  // best-bound proof
    if (processed >= opt.max_nodes) {
      hit_node_limit = true;
      break;
    }
    ++processed;

    // Reconstruct bounds along the parent chain (root to leaf order).
    lb = base_lb;
    ub = base_ub;
    chain.clear();
    for (int k = idx; k > 0; k = nodes[k].parent) chain.push_back(k);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Node& nd = nodes[*it];
      lb[nd.var] = std::max(lb[nd.var], nd.lb);
      ub[nd.var] = std::min(ub[nd.var], nd.ub);
    }

    Solution rel = solve_lp_with_bounds(model, lb, ub, opt);
    total_iters += rel.iterations;
    if (rel.status == SolveStatus::Infeasible) continue;
    if (rel.status == SolveStatus::Unbounded) {
      if (idx == 0) root_unbounded = true;
      break;
    }
    if (rel.status == SolveStatus::IterationLimit) {
      Solution out;
      out.status = SolveStatus::IterationLimit;
      out.nodes = processed;
      out.iterations = total_iters;
      return out;
    }
    if (rel.objective >= incumbent_obj - opt.mip_abs_gap) continue;

    // Most fractional integer variable, ties by lowest id.
    int branch_var = -1;
    double best_frac = opt.int_tol;
    for (int j : int_vars) {
      const double v = rel.x[j];
      const double frac = std::abs(v - std::round(v));
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      // Integral: new incumbent.
      incumbent_obj = rel.objective;
      incumbent_x = rel.x;
      continue;
    }

    const double v = rel.x[branch_var];
    Node down;
    down.parent = idx;
    down.var = branch_var;
    down.lb = lb[branch_var];
    down.ub = std::floor(v);
    down.bound = rel.objective;
    nodes.push_back(down);
    open.emplace(rel.objective, seq++, static_cast<int>(nodes.size()) - 1);

    Node up;
    up.parent = idx;
    up.var = branch_var;
    up.lb = std::ceil(v);
    up.ub = ub[branch_var];
    up.bound = rel.objective;
    nodes.push_back(up);
    open.emplace(rel.objective, seq++, static_cast<int>(nodes.size()) - 1);
  }

  Solution out;
  out.nodes = processed;
  out.iterations = total_iters;
  if (root_unbounded) {
    out.status = SolveStatus::Unbounded;
    return out;
  }
  if (incumbent_x.empty()) {
    out.status = hit_node_limit ? SolveStatus::NodeLimit : SolveStatus::Infeasible;
    return out;
  }
  if (hit_node_limit) {
    out.status = SolveStatus::NodeLimit;
    out.x = incumbent_x;
    out.objective = incumbent_obj;
    return out;
  }

  // Clean-up solve: fix integers at their rounded incumbent values and
  // re-solve the LP so the continuous part is exactly feasible for them.
  lb = base_lb;
  ub = base_ub;
  for (int j : int_vars) {
    const double v = std::round(incumbent_x[j]);
    lb[j] = v;
    ub[j] = v;
  }
  Solution fin = solve_lp_with_bounds(model, lb, ub, opt);
  if (fin.status != SolveStatus::Optimal)
    throw SolverFailure("clean-up solve failed after branch-and-bound");
  fin.nodes = processed;
  fin.iterations = total_iters + fin.iterations;
  fin.row_dual.clear();      // duals are not meaningful for the MILP
  fin.reduced_cost.clear();
  return fin;
}

Solution solve_model(const ModelInstance& model, const SolveOptions& opt) {
  return model.has_integers() ? solve_milp(model, opt) : solve_lp(model, opt);
}

}  // namespace vfc
