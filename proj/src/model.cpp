#include "vfc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vfc/errors.hpp"

namespace vfc {

int ModelInstance::add_variable(const std::string& name, double lb, double ub, bool integer) {
  Variable v;
  v.name = name;
  v.lb = lb;
  v.ub = ub;
  v.integer = integer;
  vars_.push_back(std::move(v));
  obj_.push_back(0.0);
  return static_cast<int>(vars_.size()) - 1;
}

int ModelInstance::add_constraint(const std::string& name, std::vector<int> cols,
                                  std::vector<double> coefs, Sense sense, double rhs) {
  if (cols.size() != coefs.size()) throw ModelError("constraint " + name + ": cols/coefs size mismatch");
  // Merge duplicate columns so builders may emit repeated terms.
  std::map<int, double> merged;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= num_vars())
      throw ModelError("constraint " + name + ": references undeclared variable");
    if (coefs[k] != 0.0) merged[cols[k]] += coefs[k];
  }
  LinearConstraint c;
  c.name = name;
  c.sense = sense;
  c.rhs = rhs;
  c.cols.reserve(merged.size());
  c.coefs.reserve(merged.size());
  for (const auto& [j, a] : merged) {
    if (a == 0.0) continue;
    c.cols.push_back(j);
    c.coefs.push_back(a);
  }
  cons_.push_back(std::move(c));
  return static_cast<int>(cons_.size()) - 1;
}

void ModelInstance::set_bounds(int var, double lb, double ub) {
  vars_[var].lb = lb;
  vars_[var].ub = ub;
}

void ModelInstance::set_objective(int var, double coef) { obj_[var] = coef; }

void ModelInstance::add_objective(int var, double coef) { obj_[var] += coef; }

bool ModelInstance::has_integers() const {
  return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.integer; });
}

double ModelInstance::row_activity(int i, const std::vector<double>& x) const {
  const LinearConstraint& c = cons_[i];
  double a = 0.0;
  for (std::size_t k = 0; k < c.cols.size(); ++k) a += c.coefs[k] * x[c.cols[k]];
  return a;
}

double ModelInstance::objective_value(const std::vector<double>& x) const {
  double v = obj_constant_;
  for (int j = 0; j < num_vars(); ++j) v += obj_[j] * x[j];
  return v;
}

double ModelInstance::max_infeasibility(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars(); ++j) {
    worst = std::max(worst, vars_[j].lb - x[j]);
    worst = std::max(worst, x[j] - vars_[j].ub);
  }
  for (int i = 0; i < num_constraints(); ++i) {
    const double a = row_activity(i, x);
    switch (cons_[i].sense) {
      case Sense::LessEqual: worst = std::max(worst, a - cons_[i].rhs); break;
      case Sense::GreaterEqual: worst = std::max(worst, cons_[i].rhs - a); break;
      case Sense::Equal: worst = std::max(worst, std::abs(a - cons_[i].rhs)); break;
    }
  }
  return worst;
}

void ModelInstance::validate() const {
  for (int j = 0; j < num_vars(); ++j) {
    const Variable& v = vars_[j];
    if (v.lb > v.ub) throw ModelError("variable " + v.name + ": lower bound above upper bound");
    if (v.integer && (!std::isfinite(v.lb) || !std::isfinite(v.ub)))
      throw ModelError("integer variable " + v.name + " must have finite bounds");
    if (std::isnan(v.lb) || std::isnan(v.ub)) throw ModelError("variable " + v.name + ": NaN bound");
  }
  for (const LinearConstraint& c : cons_) {
    if (std::isnan(c.rhs)) throw ModelError("constraint " + c.name + ": NaN rhs");
    for (double a : c.coefs)
      if (std::isnan(a) || std::isinf(a)) throw ModelError("constraint " + c.name + ": bad coefficient");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::NodeLimit: return "node-limit";
  }
  return "unknown";
}

}  // namespace vfc
