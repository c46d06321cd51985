#pragma once

#include <vector>

#include "vfc/model.hpp"

namespace vfc {

// Adds, for each listed variable x_k (which must have finite bounds), an
// epigraph variable t_k >= secant interpolation of coef*(x_k - center_k)^2
// on a uniform grid of `segments` pieces over [lb, ub], with the center
// inserted as an extra knot so the penalty is exactly zero at the center.
// Each t_k enters the objective with coefficient 1. Returns the t_k ids.
//
// The interpolant overestimates the quadratic by at most coef*h^2/4 per
// component, h being the grid step.
std::vector<int> add_pwl_quadratic(ModelInstance& model, const std::vector<int>& vars,
                                   const std::vector<double>& centers, double coef,
                                   int segments);

// Value of the same interpolant at a point (test/reference helper).
double pwl_quadratic_value(double x, double center, double coef, int segments,
                           double lb, double ub);

}  // namespace vfc
