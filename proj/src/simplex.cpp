#include "vfc/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "vfc/errors.hpp"

namespace vfc {

namespace {

enum class VStat : char { Basic, AtLower, AtUpper, FreeNB };

// Bounded-variable primal simplex on the equality form [A I][x;s] = b.
// Phase 1 drives out-of-bound basic variables (the initial slack basis is
// structurally nonsingular but generally infeasible); phase 2 optimizes the
// true objective. Dense basis inverse, Gauss-Jordan pivot updates, periodic
// refactorization. Entering rule is most-negative reduced cost with Bland's
// rule engaged after 200 consecutive degenerate pivots.
class Simplex {
 public:
  Simplex(const ModelInstance& model, const std::vector<double>* lb_override,
          const std::vector<double>* ub_override, const SolveOptions& opt)
      : opt_(opt) {
    n_ = model.num_vars();
    m_ = model.num_constraints();
    nt_ = n_ + m_;

    cols_.assign(static_cast<std::size_t>(m_) * nt_, 0.0);
    b_.resize(m_);
    c_.assign(nt_, 0.0);
    lb_.resize(nt_);
    ub_.resize(nt_);

    for (int j = 0; j < n_; ++j) {
      lb_[j] = lb_override ? (*lb_override)[j] : model.var(j).lb;
      ub_[j] = ub_override ? (*ub_override)[j] : model.var(j).ub;
      c_[j] = model.objective_coef(j);
    }
    for (int i = 0; i < m_; ++i) {
      const LinearConstraint& con = model.con(i);
      for (std::size_t k = 0; k < con.cols.size(); ++k) at(i, con.cols[k]) = con.coefs[k];
      b_[i] = con.rhs;
      const int s = n_ + i;
      at(i, s) = 1.0;
      switch (con.sense) {
        case Sense::LessEqual: lb_[s] = 0.0; ub_[s] = kInf; break;
        case Sense::GreaterEqual: lb_[s] = -kInf; ub_[s] = 0.0; break;
        case Sense::Equal: lb_[s] = 0.0; ub_[s] = 0.0; break;
      }
    }
    obj_const_ = model.objective_constant();
  }

  Solution run() {
    Solution sol;
    for (int j = 0; j < nt_; ++j)
      if (lb_[j] > ub_[j] + opt_.feas_tol) {
        sol.status = SolveStatus::Infeasible;
        return sol;
      }

    init_basis();

    const SolveStatus st1 = iterate(/*phase1=*/true);
    if (st1 != SolveStatus::Optimal) {
      sol.status = st1;
      sol.iterations = iters_;
      return sol;
    }
    if (total_infeasibility() > 1e-6) {
      sol.status = SolveStatus::Infeasible;
      sol.iterations = iters_;
      return sol;
    }

    const SolveStatus st2 = iterate(/*phase1=*/false);
    sol.status = st2;
    sol.iterations = iters_;
    if (st2 != SolveStatus::Optimal) return sol;

    // Primal values, duals y = c_B' B^-1, reduced costs z = c - A'y.
    sol.x.assign(x_.begin(), x_.begin() + n_);
    std::vector<double> y = duals(c_);
    sol.row_dual = y;
    sol.reduced_cost.resize(n_);
    for (int j = 0; j < n_; ++j) sol.reduced_cost[j] = c_[j] - col_dot(j, y);
    double obj = obj_const_;
    for (int j = 0; j < n_; ++j) obj += c_[j] * x_[j];
    sol.objective = obj;
    return sol;
  }

 private:
  double& at(int i, int j) { return cols_[static_cast<std::size_t>(j) * m_ + i]; }
  double atc(int i, int j) const { return cols_[static_cast<std::size_t>(j) * m_ + i]; }

  double col_dot(int j, const std::vector<double>& y) const {
    const double* col = cols_.data() + static_cast<std::size_t>(j) * m_;
    double s = 0.0;
    for (int i = 0; i < m_; ++i) s += col[i] * y[i];
    return s;
  }

  void init_basis() {
    vstat_.assign(nt_, VStat::AtLower);
    x_.assign(nt_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lb_[j])) {
        vstat_[j] = VStat::AtLower;
        x_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        vstat_[j] = VStat::AtUpper;
        x_[j] = ub_[j];
      } else {
        vstat_[j] = VStat::FreeNB;
        x_[j] = 0.0;
      }
    }
    basic_.resize(m_);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      vstat_[n_ + i] = VStat::Basic;
      binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    }
    recompute_basics();
  }

  // x_B = B^-1 (b - A_N x_N)
  void recompute_basics() {
    std::vector<double> rhs = b_;
    for (int j = 0; j < nt_; ++j) {
      if (vstat_[j] == VStat::Basic || x_[j] == 0.0) continue;
      const double* col = cols_.data() + static_cast<std::size_t>(j) * m_;
      for (int i = 0; i < m_; ++i) rhs[i] -= col[i] * x_[j];
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = binv_.data() + static_cast<std::size_t>(i) * m_;
      double v = 0.0;
      for (int k = 0; k < m_; ++k) v += row[k] * rhs[k];
      x_[basic_[i]] = v;
    }
  }

  void refactorize() {
    // Invert the basis matrix by Gauss-Jordan with partial pivoting.
    std::vector<double> mat(static_cast<std::size_t>(m_) * m_);
    for (int k = 0; k < m_; ++k)
      for (int i = 0; i < m_; ++i) mat[static_cast<std::size_t>(i) * m_ + k] = atc(i, basic_[k]);
    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::abs(mat[static_cast<std::size_t>(col) * m_ + col]);
      for (int i = col + 1; i < m_; ++i) {
        const double v = std::abs(mat[static_cast<std::size_t>(i) * m_ + col]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-12) throw SolverFailure("singular basis during refactorization");
      if (piv != col) {
        for (int k = 0; k < m_; ++k) {
          std::swap(mat[static_cast<std::size_t>(piv) * m_ + k], mat[static_cast<std::size_t>(col) * m_ + k]);
          std::swap(inv[static_cast<std::size_t>(piv) * m_ + k], inv[static_cast<std::size_t>(col) * m_ + k]);
        }
      }
      const double d = mat[static_cast<std::size_t>(col) * m_ + col];
      const double dinv = 1.0 / d;
      for (int k = 0; k < m_; ++k) {
        mat[static_cast<std::size_t>(col) * m_ + k] *= dinv;
        inv[static_cast<std::size_t>(col) * m_ + k] *= dinv;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = mat[static_cast<std::size_t>(i) * m_ + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          mat[static_cast<std::size_t>(i) * m_ + k] -= f * mat[static_cast<std::size_t>(col) * m_ + k];
          inv[static_cast<std::size_t>(i) * m_ + k] -= f * inv[static_cast<std::size_t>(col) * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    recompute_basics();
  }

  // y = d_B' B^-1 for a cost vector d over all columns.
  std::vector<double> duals(const std::vector<double>& d) const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double db = d[basic_[i]];
      if (db == 0.0) continue;
      const double* row = binv_.data() + static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) y[k] += db * row[k];
    }
    return y;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      s += std::max(0.0, lb_[j] - x_[j]);
      s += std::max(0.0, x_[j] - ub_[j]);
    }
    return s;
  }

  // Phase-1 cost: -1 for basic variables below lower bound, +1 above upper.
  std::vector<double> phase1_costs() const {
    std::vector<double> d(nt_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (x_[j] < lb_[j] - opt_.feas_tol) d[j] = -1.0;
      else if (x_[j] > ub_[j] + opt_.feas_tol) d[j] = 1.0;
    }
    return d;
  }

  SolveStatus iterate(bool phase1) {
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;

    while (true) {
      if (iters_ >= opt_.max_iterations) return SolveStatus::IterationLimit;
      if (phase1 && total_infeasibility() <= opt_.feas_tol) return SolveStatus::Optimal;

      const std::vector<double> d = phase1 ? phase1_costs() : c_;
      const std::vector<double> y = duals(d);

      // Pricing.
      int enter = -1;
      int dir = 0;
      double best_score = bland ? 0.0 : opt_.opt_tol;
      for (int j = 0; j < nt_; ++j) {
        if (vstat_[j] == VStat::Basic) continue;
        if (ub_[j] - lb_[j] <= 1e-12) continue;  // fixed
        const double r = d[j] - col_dot(j, y);
        int cand_dir = 0;
        if (vstat_[j] == VStat::AtLower && r < -opt_.opt_tol) cand_dir = +1;
        else if (vstat_[j] == VStat::AtUpper && r > opt_.opt_tol) cand_dir = -1;
        else if (vstat_[j] == VStat::FreeNB && std::abs(r) > opt_.opt_tol) cand_dir = (r < 0.0) ? +1 : -1;
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        const double score = std::abs(r);
        if (score > best_score) {
          best_score = score;
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) {
        if (phase1) {
          // No improving direction: feasible or proven infeasible.
          return SolveStatus::Optimal;
        }
        return SolveStatus::Optimal;
      }

      // Column in the basis frame: w = B^-1 A_enter.
      std::vector<double> w(m_, 0.0);
      {
        const double* col = cols_.data() + static_cast<std::size_t>(enter) * m_;
        for (int i = 0; i < m_; ++i) {
          const double* row = binv_.data() + static_cast<std::size_t>(i) * m_;
          double v = 0.0;
          for (int k = 0; k < m_; ++k) v += row[k] * col[k];
          w[i] = v;
        }
      }

      // Ratio test. Travel Delta >= 0 in direction dir; basic i moves at rate
      // -dir*w_i. Out-of-bound basic variables block only when they reach the
      // violated bound (first breakpoint of the phase-1 objective).
      double limit = kInf;
      int block_pos = -1;       // basis position, or -1 for entering's own bound
      int block_to_upper = 0;   // which bound the leaving variable hits
      if (std::isfinite(ub_[enter]) && std::isfinite(lb_[enter])) limit = ub_[enter] - lb_[enter];

      for (int i = 0; i < m_; ++i) {
        if (std::abs(w[i]) <= 1e-10) continue;
        const int j = basic_[i];
        const double rate = -static_cast<double>(dir) * w[i];
        const double v = x_[j];
        double cand = kInf;
        int to_upper = 0;
        if (phase1 && v < lb_[j] - opt_.feas_tol) {
          if (rate > 0.0) { cand = (lb_[j] - v) / rate; to_upper = 0; }
        } else if (phase1 && v > ub_[j] + opt_.feas_tol) {
          if (rate < 0.0) { cand = (ub_[j] - v) / rate; to_upper = 1; }
        } else {
          if (rate > 0.0 && std::isfinite(ub_[j])) { cand = (ub_[j] - v) / rate; to_upper = 1; }
          else if (rate < 0.0 && std::isfinite(lb_[j])) { cand = (lb_[j] - v) / rate; to_upper = 0; }
        }
        if (cand == kInf) continue;
        cand = std::max(cand, 0.0);
        bool take = false;
        if (cand < limit - 1e-9) take = true;
        else if (cand < limit + 1e-9 && block_pos >= 0) {
          if (bland) take = basic_[i] < basic_[block_pos];
          else take = std::abs(w[i]) > std::abs(w[block_pos]) + 1e-12;
        } else if (cand < limit + 1e-9 && block_pos < 0 && cand < limit) {
          take = true;
        }
        if (take) {
          limit = std::min(limit, cand);
          block_pos = i;
          block_to_upper = to_upper;
        }
      }

      if (!std::isfinite(limit)) {
        if (phase1) throw SolverFailure("phase-1 ray: inconsistent infeasibility pricing");
        return SolveStatus::Unbounded;
      }

      // Degeneracy guard.
      if (limit <= 1e-11) {
        if (++degenerate_run > 200) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      // Apply the step.
      x_[enter] += dir * limit;
      for (int i = 0; i < m_; ++i) {
        if (w[i] == 0.0) continue;
        x_[basic_[i]] -= dir * limit * w[i];
      }

      if (block_pos < 0) {
        // Bound-to-bound flip of the entering variable.
        vstat_[enter] = (dir > 0) ? VStat::AtUpper : VStat::AtLower;
        x_[enter] = (dir > 0) ? ub_[enter] : lb_[enter];
      } else {
        const int leave = basic_[block_pos];
        if (std::abs(w[block_pos]) < 1e-9 && since_refactor > 0) {
          // Unstable pivot: rebuild the inverse and retry the iteration.
          refactorize();
          since_refactor = 0;
          continue;
        }
        vstat_[leave] = block_to_upper ? VStat::AtUpper : VStat::AtLower;
        x_[leave] = block_to_upper ? ub_[leave] : lb_[leave];
        vstat_[enter] = VStat::Basic;
        basic_[block_pos] = enter;

        // Gauss-Jordan update of B^-1 with pivot w[block_pos].
        const double piv = w[block_pos];
        double* prow = binv_.data() + static_cast<std::size_t>(block_pos) * m_;
        const double pinv = 1.0 / piv;
        for (int k = 0; k < m_; ++k) prow[k] *= pinv;
        for (int i = 0; i < m_; ++i) {
          if (i == block_pos) continue;
          const double f = w[i];
          if (f == 0.0) continue;
          double* row = binv_.data() + static_cast<std::size_t>(i) * m_;
          for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
        }
      }

      ++iters_;
      if (++since_refactor >= 100) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

  SolveOptions opt_;
  int n_ = 0, m_ = 0, nt_ = 0;
  std::vector<double> cols_;  // column-major (m x nt)
  std::vector<double> b_, c_, lb_, ub_;
  double obj_const_ = 0.0;

  std::vector<int> basic_;
  std::vector<VStat> vstat_;
  std::vector<double> x_;
  std::vector<double> binv_;  // row-major (m x m)
  long iters_ = 0;
};

}  // namespace

Solution solve_lp(const ModelInstance& model, const SolveOptions& opt) {
  model.validate();
  Simplex s(model, nullptr, nullptr, opt);
  return s.run();
}

Solution solve_lp_with_bounds(const ModelInstance& model, const std::vector<double>& lb,
                              const std::vector<double>& ub, const SolveOptions& opt) {
  Simplex s(model, &lb, &ub, opt);
  return s.run();
}

double weak_duality_residual(const ModelInstance& model, const Solution& sol) {
  if (sol.status != SolveStatus::Optimal) return 0.0;
  const int n = model.num_vars();
  const int m = model.num_constraints();
  // c'x vs y'b + z'x over the equality form with slacks; slack reduced cost
  // is -y_i and slack value is rhs - activity.
  double primal = 0.0;
  for (int j = 0; j < n; ++j) primal += model.objective_coef(j) * sol.x[j];
  double dual = 0.0;
  for (int i = 0; i < m; ++i) dual += sol.row_dual[i] * model.con(i).rhs;
  for (int j = 0; j < n; ++j) dual += sol.reduced_cost[j] * sol.x[j];
  for (int i = 0; i < m; ++i) {
    const double slack = model.con(i).rhs - model.row_activity(i, sol.x);
    dual += (-sol.row_dual[i]) * slack;
  }
  return std::abs(primal - dual);
}

double complementarity_residual(const ModelInstance& model, const Solution& sol) {
  if (sol.status != SolveStatus::Optimal) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < model.num_constraints(); ++i) {
    if (model.con(i).sense == Sense::Equal) continue;
    const double slack = model.con(i).rhs - model.row_activity(i, sol.x);
    worst = std::max(worst, std::abs(sol.row_dual[i] * slack));
  }
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.var(j);
    const double z = sol.reduced_cost[j];
    if (z == 0.0) continue;
    double gap;
    if (z > 0.0) gap = std::isfinite(v.lb) ? sol.x[j] - v.lb : std::abs(sol.x[j]);
    else gap = std::isfinite(v.ub) ? v.ub - sol.x[j] : std::abs(sol.x[j]);
    worst = std::max(worst, std::abs(z * gap));
  }
  return worst;
}

}  // namespace vfc
