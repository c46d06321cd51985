#pragma once

#include <limits>
#include <string>
#include <vector>

namespace vfc {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : char {
  LessEqual = 'L',
  Equal = 'E',
  GreaterEqual = 'G',
};

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  bool integer = false;
};

// Sparse linear row: sum_j coefs[j] * x[cols[j]]  (sense)  rhs.
struct LinearConstraint {
  std::string name;
  std::vector<int> cols;
  std::vector<double> coefs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// Record of a piecewise-linear epigraph encoding of coef*(x_k - center_k)^2,
// one epigraph variable per component. Rows are secant cuts.
struct PwlBlock {
  std::vector<int> vars;
  std::vector<double> centers;
  double coef = 0.0;
  int segments = 0;
  std::vector<int> epi_vars;
};

// General LP/MILP container. Minimization form throughout.
class ModelInstance {
 public:
  int add_variable(const std::string& name, double lb, double ub, bool integer = false);
  int add_constraint(const std::string& name, std::vector<int> cols,
                     std::vector<double> coefs, Sense sense, double rhs);

  void set_bounds(int var, double lb, double ub);
  void set_objective(int var, double coef);
  void add_objective(int var, double coef);
  void set_objective_constant(double c) { obj_constant_ = c; }
  void add_objective_constant(double c) { obj_constant_ += c; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const Variable& var(int j) const { return vars_[j]; }
  Variable& var(int j) { return vars_[j]; }
  const LinearConstraint& con(int i) const { return cons_[i]; }
  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<LinearConstraint>& cons() const { return cons_; }
  double objective_coef(int j) const { return obj_[j]; }
  const std::vector<double>& objective() const { return obj_; }
  double objective_constant() const { return obj_constant_; }

  bool has_integers() const;

  // Row activity at a point, and objective value at a point.
  double row_activity(int i, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;

  // Max violation of rows and bounds at a point.
  double max_infeasibility(const std::vector<double>& x) const;

  // Throws ModelError on dangling references, reversed bounds, or integer
  // variables with infinite bounds.
  void validate() const;

  std::vector<PwlBlock>& pwl_blocks() { return pwl_; }
  const std::vector<PwlBlock>& pwl_blocks() const { return pwl_; }

 private:
  std::vector<Variable> vars_;
  std::vector<LinearConstraint> cons_;
  std::vector<double> obj_;
  double obj_constant_ = 0.0;
  std::vector<PwlBlock> pwl_;
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  NodeLimit,
};

const char* to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;             // structural variable values
  std::vector<double> row_dual;      // y with c = A'y + z at optimality (LP)
  std::vector<double> reduced_cost;  // z per structural variable (LP)
  double objective = 0.0;
  long iterations = 0;
  long nodes = 0;
};

struct SolveOptions {
  long max_iterations = 1'000'000;  // simplex pivots
  long max_nodes = 1'000'000;       // branch-and-bound nodes
  double feas_tol = 1e-7;
  double opt_tol = 1e-9;
  double int_tol = 1e-6;
  double mip_abs_gap = 1e-6;
};

}  // namespace vfc
