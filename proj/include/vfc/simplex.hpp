#pragma once

#include <vector>

#include "vfc/model.hpp"

namespace vfc {

// Solves a pure LP (no integer restrictions are enforced even if declared).
Solution solve_lp(const ModelInstance& model, const SolveOptions& opt = {});

// Same, with replacement variable bounds (used by branch-and-bound).
Solution solve_lp_with_bounds(const ModelInstance& model, const std::vector<double>& lb,
                              const std::vector<double>& ub, const SolveOptions& opt = {});

// |c'x - (y'b + z'x)| over the equality form; an exact identity at a basic
// solution up to roundoff. Reported by tests as the weak-duality residual.
double weak_duality_residual(const ModelInstance& model, const Solution& sol);

// Max |dual * slack| over rows plus |reduced cost * bound slack| over
// variables; complementary-slackness residual of an LP solution.
double complementarity_residual(const ModelInstance& model, const Solution& sol);

}  // namespace vfc
