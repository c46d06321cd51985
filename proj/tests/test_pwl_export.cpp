#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vfc/errors.hpp"
#include "vfc/lp_format.hpp"
#include "vfc/milp.hpp"
#include "vfc/model.hpp"
#include "vfc/pwl.hpp"
#include "vfc/simplex.hpp"
#include "vfc/util.hpp"

using namespace vfc;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "vfc_test_pwl";
  fs::create_directories(dir);
  return dir;
}

// Minimum epigraph value at a pinned point, through an actual solve.
double lp_pwl_value(double x_at, double center, double coef, int segments) {
  ModelInstance m;
  const int x = m.add_variable("x", 0.0, 1.0);
  m.set_bounds(x, x_at, x_at);
  add_pwl_quadratic(m, {x}, {center}, coef, segments);
  const Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  return s.objective;
}

}  // namespace

TEST_CASE("penalty vanishes at the center knot") {
  for (double center : {0.0, 0.3, 0.5, 0.77, 1.0}) {
    CHECK(lp_pwl_value(center, center, 12500.0, 32) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pwl_quadratic_value(center, center, 12500.0, 32, 0.0, 1.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("endpoint knot is exact") {
  // coefficient 1 (rho = 2), center 0.5, x = 1: value 0.25 exactly.
  CHECK(lp_pwl_value(1.0, 0.5, 1.0, 4) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("interpolant overestimates the quadratic within the stated bound") {
  const double rho = 25000.0;
  const int segments = 32;
  const double bound = rho / (8.0 * segments * segments);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = static_cast<double>(i) / 1000.0;
    const double q = (rho / 2.0) * (x - 0.37) * (x - 0.37);
    const double v = pwl_quadratic_value(x, 0.37, rho / 2.0, segments, 0.0, 1.0);
    CHECK(v >= q - 1e-9);
    worst = std::max(worst, v - q);
  }
  CHECK(worst <= bound + 1e-9);
  CHECK(bound == doctest::Approx(25000.0 / 8192.0));
}

TEST_CASE("a solved model matches the closed-form interpolant") {
  for (double x : {0.05, 0.31, 0.5, 0.93}) {
    const double via_lp = lp_pwl_value(x, 0.4, 1000.0, 8);
    const double direct = pwl_quadratic_value(x, 0.4, 1000.0, 8, 0.0, 1.0);
    CHECK(via_lp == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("unbounded variables are rejected") {
  ModelInstance m;
  const int x = m.add_variable("x", 0.0, kInf);
  CHECK_THROWS_AS(add_pwl_quadratic(m, {x}, {0.5}, 1.0, 4), ModelError);
}

TEST_CASE("single-variable export carries exactly one bounds entry") {
  ModelInstance m;
  m.add_variable("x", 2.0, 7.0);
  m.set_objective(0, 1.0);
  const std::string text = lp_format_text(m);
  CHECK(text.find("Bounds\n 2 <= x <= 7\n") != std::string::npos);
  std::size_t count = 0;
  for (std::size_t pos = text.find("x"); pos != std::string::npos; pos = text.find("x", pos + 1))
    if (pos > 0 && text[pos - 1] == ' ') ++count;
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("exports are byte-identical across calls") {
  ModelInstance m;
  const int x = m.add_variable("p_g1_t1", 0.0, 100.0);
  const int u = m.add_variable("u_g1_t2", 0.0, 1.0, true);
  m.add_constraint("cap", {x, u}, {1.0, -100.0}, Sense::LessEqual, 0.0);
  m.add_constraint("bal", {x}, {1.0}, Sense::Equal, 42.5);
  m.set_objective(x, 10.0);
  m.set_objective_constant(3.25);
  const fs::path a = temp_dir() / "export_a.lp";
  const fs::path b = temp_dir() / "export_b.lp";
  write_lp_file(m, a.string());
  write_lp_file(m, b.string());
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("General") != std::string::npos);
}

TEST_CASE("external-solver adapter round-trips a solution file") {
  ModelInstance m;
  const int x = m.add_variable("x", 0.0, 10.0);
  const int y = m.add_variable("y", 0.0, 10.0);
  m.add_constraint("sum", {x, y}, {1.0, 1.0}, Sense::GreaterEqual, 4.0);
  m.set_objective(x, 2.0);
  m.set_objective(y, 3.0);
  const Solution ref = solve_lp(m);
  REQUIRE(ref.status == SolveStatus::Optimal);

  const fs::path dir = temp_dir();
  const fs::path sol_path = dir / "stub_solution.txt";
  {
    std::ofstream out(sol_path);
    out << "# stub external solver output\n";
    out << "x " << fmt_full(ref.x[0]) << "\n";
    out << "y " << fmt_full(ref.x[1]) << "\n";
  }
  const Solution parsed = ExternalSolver::parse_solution_file(m, sol_path.string());
  CHECK(parsed.status == SolveStatus::Optimal);
  CHECK(parsed.objective == doctest::Approx(ref.objective).epsilon(1e-9));

  // Full command path: the "solver" just copies the prepared answer over.
  ExternalSolver ext("cp " + sol_path.string() + " {solution} && cat {model} > /dev/null");
  const Solution via_cmd = ext.solve(m, (dir / "extrun").string());
  CHECK(via_cmd.objective == doctest::Approx(ref.objective).epsilon(1e-9));
}

TEST_CASE("unknown names in a solution file are rejected") {
  ModelInstance m;
  m.add_variable("x", 0.0, 1.0);
  const fs::path bad = temp_dir() / "bad_solution.txt";
  {
    std::ofstream out(bad);
    out << "nope 1.0\n";
  }
  CHECK_THROWS_AS(ExternalSolver::parse_solution_file(m, bad.string()), DataError);
}
