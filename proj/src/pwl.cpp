#include "vfc/pwl.hpp"

#include <algorithm>
#include <cmath>

#include "vfc/errors.hpp"

namespace vfc {

namespace {

std::vector<double> knot_grid(double lb, double ub, double center, int segments) {
  std::vector<double> knots;
  knots.reserve(segments + 2);
  for (int i = 0; i <= segments; ++i) knots.push_back(lb + (ub - lb) * i / segments);
  if (center > lb + 1e-12 && center < ub - 1e-12) {
    bool present = false;
    for (double k : knots)
      if (std::abs(k - center) <= 1e-12) present = true;
    if (!present) {
      knots.push_back(center);
      std::sort(knots.begin(), knots.end());
    }
  }
  return knots;
}

}  // namespace

std::vector<int> add_pwl_quadratic(ModelInstance& model, const std::vector<int>& vars,
                                   const std::vector<double>& centers, double coef,
                                   int segments) {
  if (vars.size() != centers.size()) throw DimensionError("pwl: vars/centers size mismatch");
  if (segments < 1) throw ModelError("pwl: segments must be >= 1");
  if (coef < 0.0) throw ModelError("pwl: negative coefficient");

  PwlBlock block;
  block.vars = vars;
  block.centers = centers;
  block.coef = coef;
  block.segments = segments;

  std::vector<int> epi;
  epi.reserve(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const int j = vars[k];
    const Variable& v = model.var(j);
    if (!std::isfinite(v.lb) || !std::isfinite(v.ub))
      throw ModelError("pwl: variable " + v.name + " must have finite bounds");
    const double c = centers[k];
    const std::vector<double> knots = knot_grid(v.lb, v.ub, c, segments);
    const auto q = [&](double x) { return coef * (x - c) * (x - c); };

    double qmax = 0.0;
    for (double x : knots) qmax = std::max(qmax, q(x));
    const int t = model.add_variable("pwl_" + v.name, 0.0, qmax, false);
    model.add_objective(t, 1.0);
    epi.push_back(t);

    // One secant cut per segment: t >= q(a) + s*(x - a).
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
      const double a = knots[s];
      const double b = knots[s + 1];
      if (b - a <= 1e-14) continue;
      const double slope = (q(b) - q(a)) / (b - a);
      model.add_constraint("pwl_" + v.name + "_s" + std::to_string(s), {t, j},
                           {1.0, -slope}, Sense::GreaterEqual, q(a) - slope * a);
    }
  }
  block.epi_vars = epi;
  model.pwl_blocks().push_back(std::move(block));
  return epi;
}

double pwl_quadratic_value(double x, double center, double coef, int segments,
                           double lb, double ub) {
  const std::vector<double> knots = knot_grid(lb, ub, center, segments);
  const auto q = [&](double v) { return coef * (v - center) * (v - center); };
  double best = 0.0;
  bool first = true;
  // The interpolant of a convex function is the max of its chords.
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double a = knots[s];
    const double b = knots[s + 1];
    if (b - a <= 1e-14) continue;
    const double slope = (q(b) - q(a)) / (b - a);
    const double val = q(a) + slope * (x - a);
    if (first || val > best) {
      best = val;
      first = false;
    }
  }
  return best;
}

}  // namespace vfc
