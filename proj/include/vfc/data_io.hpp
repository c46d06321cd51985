#pragma once

#include <string>
#include <vector>

#include "vfc/grid.hpp"
#include "vfc/scenario.hpp"

namespace vfc {

// Monotone (speed m/s, power fraction) knots. Zero below the first knot and
// beyond the last (cut-out); linear interpolation in between.
struct PowerCurve {
  std::vector<std::pair<double, double>> knots;
  void validate() const;
};

double wind_speed_to_power(double speed, const PowerCurve& curve, double capacity_mw);
std::vector<double> wind_speed_to_power(const std::vector<double>& speeds,
                                        const PowerCurve& curve, double capacity_mw);

enum class Trainer { Ph, Pfph, Stm, Rmse, Fixed };

const char* to_string(Trainer t);
Trainer trainer_from_string(const std::string& s);

struct RunConfig {
  std::string grid_path, series_path, actuals_path;
  std::vector<std::string> providers;
  Trainer trainer = Trainer::Ph;
  double rho = 25000.0;
  double eps = 1e-5;
  int dprime = 0;  // 0 -> ceil(D/3)
  std::string variant = "relaxed";
  int segments = 32;
  int max_iter = 500;
  int parallelism = 1;
  std::vector<double> fixed_lambda;
  std::vector<int> train_days, test_days;
  std::string out_dir = "out";
  std::string external_solver;
  double big_m = 0.0;  // 0 -> auto
  unsigned long seed = 1;

  void validate() const;
};

Grid load_grid(const std::string& path);
void save_grid(const Grid& grid, const std::string& path);

// Series CSV columns: day,hour,node,provider,forecast_net_load,forecast_wind.
// Actuals CSV columns: day,hour,node,net_load[,wind] (a missing wind column
// defaults to zero and adds a warning). Hours run 1..T; every
// (day,provider,node,hour) cell must be present.
std::vector<ScenarioDay> load_timeseries(const std::string& series_path,
                                         const std::string& actuals_path, const Grid& grid,
                                         const std::vector<std::string>& providers, int horizon,
                                         std::vector<std::string>* warnings = nullptr);
void save_timeseries(const std::vector<ScenarioDay>& days, const Grid& grid,
                     const std::vector<std::string>& providers, const std::string& series_path,
                     const std::string& actuals_path);

// Relative data paths inside the file resolve against its directory.
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

void save_lambda_json(const std::vector<double>& lambda, const std::vector<std::string>& providers,
                      const std::string& trainer, bool converged, int iterations,
                      const std::string& path);
std::vector<double> load_lambda_json(const std::string& path);

}  // namespace vfc
