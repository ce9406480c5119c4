#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "momfilt/density.hpp"
#include "momfilt/filter.hpp"
#include "momfilt/grid.hpp"
#include "momfilt/solver.hpp"

namespace momfilt {

// Everything a reproducible experiment needs.  All randomness flows from the
// single seed; per-run streams are derived from it, so a rerun with the same
// config reproduces every number.
struct ScenarioConfig {
  std::string scenario = "localize";  // approx1 | approx2 | approx3 | localize
  int order = 4;
  double xmin = -15.0;
  double xmax = 10.0;
  int nodes = 2001;
  int runs = 50;
  int steps = 13;
  std::uint64_t seed = 20250823;
  std::vector<std::string> filters = {"kf", "pf", "dpbm"};
  int particles = 5000;
  double process_std = 0.03;     // std dev of the Gaussian motion noise
  double obs_scale = 0.25;       // Gumbel scale, or std dev when obs_model is gaussian
  double kf_obs_std = 0.35;      // observation std dev the Kalman baseline assumes
  std::string obs_model = "gumbel";  // gumbel | gaussian
  SolverOptions solver;

  GridSpec grid() const { return GridSpec(xmin, xmax, nodes); }
  void validate() const;  // throws invalid_argument on a bad field
  bool operator==(const ScenarioConfig& other) const;
};

ScenarioConfig default_approx_config(int example_id);
ScenarioConfig default_localization_config();

// recognized filter names in report column order
const std::vector<std::string>& known_filters();

// JSON round-trip, used for config files and the report's config echo.
std::string config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const std::string& text);

// Target mixture and printed reference density of the three approximation
// benchmarks.
Density example_mixture(int example_id);
Density example_reference(int example_id);

struct FitSummary {
  SurrogateParams params;
  SolverReport report;
  double l1_error = 0.0;
  int interior_maxima = 0;
  double seconds = 0.0;         // wall clock; kept out of deterministic outputs
  std::vector<double> density;  // fitted values on the report grid
};

struct StepRecord {
  int t = 0;
  std::vector<double> p, q;
};

// One fully recorded trajectory (run 0) for plots and diagnostics.
struct TrajectorySample {
  std::vector<double> truth;         // x_1..x_T
  std::vector<double> observations;  // z_1..z_T
  std::map<std::string, std::vector<double>> estimates;
  std::vector<StepRecord> dpbm_steps;
};

struct Exclusion {
  int run = 0;
  std::string filter;
  std::string message;
};

struct RunReport {
  ScenarioConfig config;
  // density approximation outputs
  std::vector<double> grid_x;
  std::vector<double> true_density;
  std::vector<double> sigma_targets, xi_targets;
  FitSummary dpbm, dppm;
  // localization outputs
  std::map<std::string, std::vector<double>> rmse;  // per filter, t = 1..steps
  std::vector<Exclusion> exclusions;
  TrajectorySample sample;
  std::map<std::string, double> filter_seconds;  // wall clock per filter, total
};

// strict local maxima over interior nodes
int count_interior_maxima(const GridFunction& f);

// Fits both surrogate flavors to the example's grid moments and reports the
// densities, L1 errors and mode counts.
RunReport run_approx_example(int example_id, const ScenarioConfig& config);

// Monte-Carlo localization study: shared truth and observations per run, the
// selected filters estimate the position after each observation, RMSE taken
// across runs per step.  A filter failure excludes that run for that filter
// only and is recorded in the report.
RunReport run_localization(const ScenarioConfig& config);

enum class EmitFormat { csv, json, both };

// Writes density.csv or rmse.csv plus report.json and timings.json into dir
// and returns the paths written.  Everything except timings.json is
// byte-identical across reruns with the same config.
std::vector<std::string> emit(const RunReport& report, EmitFormat format, const std::string& dir);

}  // namespace momfilt
