#include "momfilt/filter.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "momfilt/errors.hpp"

namespace momfilt {
namespace {

void normalize_in_place(GridFunction& f, const char* what) {
  const double mass = integrate(f);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    std::ostringstream msg;
    msg << what << ": normalizing integral " << mass << " is not positive";
    throw DegenerateLikelihoodError(msg.str());
  }
  for (double& v : f.values) v /= mass;
}

// Reference for the next fit: Gaussian at the propagated mean with the
// propagated central variance times the configured factor.
Density next_reference(const std::vector<double>& sigma, double factor) {
  const double mean = sigma[0];
  const double var = sigma[1] - mean * mean;
  if (!(var > 0.0))
    throw FeasibilityError("filter_step: propagated moments have nonpositive variance");
  return Density(Gaussian{mean, factor * var});
}

// Quadrature window for the surrogate fit, centered on the reference and
// clipped to the filter grid.
GridSpec fit_window(const Density& theta, const GridSpec& grid, const FilterOptions& opts) {
  const auto& g = std::get<Gaussian>(theta.variant());
  const double half = opts.fit_halfwidth_sigmas * std::sqrt(g.variance);
  const double lo = std::max(grid.lo, g.mean - half);
  const double hi = std::min(grid.hi, g.mean + half);
  if (!(lo < hi)) throw FeasibilityError("filter_step: fit window left the filter grid");
  return GridSpec(lo, hi, opts.fit_nodes);
}

// The fit is only positive on its own window, so the prior handed to the next
// measurement update is the fit tabulated over the filter grid, zero outside
// the window.  The reference tails beyond the window carry negligible mass.
Density windowed_prior(const SurrogateParams& params, const GridSpec& fit_grid,
                       const GridSpec& grid) {
  const Density fitted = to_density(params, fit_grid);
  GridFunction tab{grid, std::vector<double>(static_cast<std::size_t>(grid.nodes), 0.0)};
  for (int i = 0; i < grid.nodes; ++i) {
    const double x = grid.node(i);
    if (x >= fit_grid.lo && x <= fit_grid.hi)
      tab.values[static_cast<std::size_t>(i)] = fitted.eval(x);
  }
  return Density(GridTabulated{std::move(tab)});
}

}  // namespace

FilterState make_initial_state(const Density& init, const GridSpec& grid,
                               const FilterOptions& opts) {
  std::vector<double> sigma = power_moments(init, opts.order, grid);
  Density theta = next_reference(sigma, opts.theta_variance_factor);
  std::vector<double> xi;
  if (!opts.power_only) xi = generalized_log_moments(init, theta, opts.order, grid);
  FilterState state{0, init, MomentVector{opts.order, std::move(sigma), std::move(xi),
                                          std::make_shared<Density>(theta)},
                    theta, SolverReport{}, SurrogateParams{}};
  return state;
}

GridFunction measurement_update(const Density& prior, double y, double h, const Density& eps,
                                const GridSpec& grid) {
  GridFunction post = tabulate(grid, [&](double x) { return eps.eval(y - h * x) * prior.eval(x); });
  normalize_in_place(post, "measurement_update");
  return post;
}

GridFunction time_update_oracle(const GridFunction& post, double f, double drift,
                                const Density& eta, const GridSpec& grid) {
  if (f == 0.0) throw std::invalid_argument("time_update_oracle: f must be nonzero");
  const double inv = 1.0 / std::abs(f);
  GridFunction scaled{post.grid, std::vector<double>(post.values.size())};
  for (int i = 0; i < post.grid.nodes; ++i)
    scaled.values[static_cast<std::size_t>(i)] = inv * post.interpolate(post.grid.node(i) / f);
  GridFunction out =
      convolve_on_grid(scaled, [&](double u) { return eta.eval(u - drift); }, grid);
  normalize_in_place(out, "time_update_oracle");
  return out;
}

FilterState filter_step(const FilterState& state, double y, const SystemModel& model,
                        const GridSpec& grid, const FilterOptions& opts) {
  const GridFunction post = measurement_update(state.prior, y, model.h, model.eps, grid);
  const std::vector<double> post_raw = raw_moments(post, opts.order);
  const std::vector<double> noise = shifted_noise_moments(model.eta, model.drift, opts.order, grid);
  std::vector<double> sigma = propagate_power_moments(post_raw, model.f, noise, opts.order);

  Density theta = next_reference(sigma, opts.theta_variance_factor);
  const GridSpec fit_grid = fit_window(theta, grid, opts);
  std::vector<double> xi;
  SolverReport report;
  SurrogateParams params;
  if (opts.power_only) {
    params = solve_power_only(sigma, theta, opts.order, fit_grid, opts.solver, &report);
  } else {
    // The predicted density is evaluated directly on the fit window so the log
    // moment targets share the quadrature the fit itself integrates with.
    const GridFunction predicted =
        time_update_oracle(post, model.f, model.drift, model.eta, fit_grid);
    xi = generalized_log_moments(predicted, theta, opts.order);
    params = solve(sigma, xi, theta, opts.order, fit_grid, opts.solver, &report);
  }
  Density prior = windowed_prior(params, fit_grid, grid);
  return FilterState{state.t + 1, std::move(prior),
                     MomentVector{opts.order, std::move(sigma), std::move(xi),
                                  std::make_shared<Density>(theta)},
                     std::move(theta), std::move(report), std::move(params)};
}

std::vector<GridFunction> grid_filter_run(const SystemModel& model,
                                          const std::vector<double>& observations,
                                          const Density& init, const GridSpec& grid) {
  std::vector<GridFunction> priors;
  priors.reserve(observations.size() + 1);
  priors.push_back(tabulate(init, grid));
  normalize_in_place(priors.back(), "grid_filter_run");
  for (double y : observations) {
    GridFunction post{priors.back().grid, priors.back().values};
    for (int i = 0; i < grid.nodes; ++i) {
      const double x = grid.node(i);
      post.values[static_cast<std::size_t>(i)] *= model.eps.eval(y - model.h * x);
    }
    normalize_in_place(post, "grid_filter_run measurement update");
    priors.push_back(time_update_oracle(post, model.f, model.drift, model.eta, grid));
  }
  return priors;
}

}  // namespace momfilt
