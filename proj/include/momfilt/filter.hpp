#pragma once

#include <vector>

#include "momfilt/density.hpp"
#include "momfilt/grid.hpp"
#include "momfilt/moments.hpp"
#include "momfilt/solver.hpp"

namespace momfilt {

// Scalar system  x_{t+1} = f x_t + drift + eta_t,  y_t = h x_t + eps_t.
// The drift is a known additive input; moment propagation folds it into the
// process noise as eta' = drift + eta.
struct SystemModel {
  double f = 1.0;
  double h = 1.0;
  double drift = 0.0;
  Density eta;
  Density eps;
};

struct FilterOptions {
  int order = 4;  // number of matched moments per family (2n)
  // reference variance is this multiple of the propagated central variance;
  // power-only runs use an inflated reference to cover heavier tails
  double theta_variance_factor = 1.0;
  bool power_only = false;  // fit the denominator only, no log moments
  // The surrogate is fitted on the window of this many reference standard
  // deviations either side of the reference mean, clipped to the filter grid.
  // The reference carries essentially all of its mass there, and a fixed order
  // denominator cannot stay conditioned over a window that is orders of
  // magnitude wider than the reference.
  double fit_halfwidth_sigmas = 6.0;
  int fit_nodes = 2001;  // quadrature nodes of the fit window
  SolverOptions solver;
};

// One step of the moment filter: the current prior, the truncated moments it
// was fitted to, and the reference density used for that fit.
struct FilterState {
  int t = 0;
  // Fitted surrogate tabulated over the filter grid (zero beyond the fit
  // window), or the configured density at t = 0.
  Density prior;
  MomentVector moments;
  Density theta;
  SolverReport fit_report;  // zeroed at t = 0, no fit has happened yet
  SurrogateParams fit;      // window fit behind the prior; empty at t = 0
};

// State at t = 0: the prior is the configured initial density itself and the
// reference is the Gaussian with its mean and (scaled) variance.
FilterState make_initial_state(const Density& init, const GridSpec& grid,
                               const FilterOptions& opts);

// Posterior proportional to eps(y - h x) * prior(x), tabulated and normalized.
GridFunction measurement_update(const Density& prior, double y, double h, const Density& eps,
                                const GridSpec& grid);

// Predicted density  int post(e / f) (1 / |f|) eta(x - drift - e) de,
// tabulated by direct quadrature and normalized.  This is the exact one-step
// reference the moment filter approximates.
GridFunction time_update_oracle(const GridFunction& post, double f, double drift,
                                const Density& eta, const GridSpec& grid);

// Full step: measurement update, closed-form power moment propagation, log
// moments of the exact predicted density against the new reference, then a
// surrogate fit to those moments.
FilterState filter_step(const FilterState& state, double y, const SystemModel& model,
                        const GridSpec& grid, const FilterOptions& opts);

// Reference filter with no surrogate: runs the exact tabulated update for
// every observation and returns the prior at every step, element 0 being the
// tabulated initial density.  All entries are normalized on the grid.
std::vector<GridFunction> grid_filter_run(const SystemModel& model,
                                          const std::vector<double>& observations,
                                          const Density& init, const GridSpec& grid);

}  // namespace momfilt
