#include "momfilt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <variant>

#include "momfilt/baselines.hpp"
#include "momfilt/errors.hpp"
#include "momfilt/moments.hpp"
#include "momfilt/rng.hpp"

namespace momfilt {
namespace {

constexpr double kStartPosition = -7.0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool same_solver(const SolverOptions& a, const SolverOptions& b) {
  return a.max_iterations == b.max_iterations && a.grad_tol == b.grad_tol &&
         a.armijo_slope == b.armijo_slope && a.backtrack == b.backtrack;
}

void normalize(GridFunction& f, const char* what) {
  const double mass = integrate(f);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    std::ostringstream msg;
    msg << what << ": normalizing integral " << mass << " is not positive";
    throw DegenerateLikelihoodError(msg.str());
  }
  for (double& v : f.values) v /= mass;
}

void finalize_fit(FitSummary& fit, const std::vector<double>& truth, const GridSpec& grid) {
  const GridFunction tab = tabulate(to_density(fit.params, grid), grid);
  fit.density = tab.values;
  const std::vector<double> w = quadrature_weights(grid);
  double acc = 0.0;
  for (int i = 0; i < grid.nodes; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    acc += w[ui] * std::abs(tab.values[ui] - truth[ui]);
  }
  fit.l1_error = acc;
  fit.interior_maxima = count_interior_maxima(tab);
}

std::vector<double> run_kf(const ScenarioConfig& config, double m0, const std::vector<double>& obs) {
  KalmanState st{m0, 1.0};
  const double q_var = config.process_std * config.process_std;
  const double r_var = config.kf_obs_std * config.kf_obs_std;
  std::vector<double> est;
  est.reserve(obs.size());
  for (double z : obs) {
    st = kalman_step(st, z, 1.0, 1.0, 1.0, q_var, r_var);
    est.push_back(st.mean);
  }
  return est;
}

std::vector<double> run_pf(const ScenarioConfig& config, const SystemModel& model,
                           const std::vector<double>& obs, Rng& rng) {
  ParticleEnsemble ens = make_uniform_ensemble(-8.0, 8.0, config.particles, rng);
  std::vector<double> est;
  est.reserve(obs.size());
  for (double z : obs) {
    ens = pf_step(ens, z, model, model.eps, rng);
    est.push_back(weighted_mean(ens));
  }
  return est;
}

// The first observation sees the state advanced once, so the initial prior is
// the one-step predictive of the N(m0, 1) belief; the Kalman and particle
// filters advance before weighting and need no such shift.
Density initial_predictive(const SystemModel& model, double m0) {
  const double var_eta = *model.eta.closed_form_power_moment(2) -
                         *model.eta.closed_form_power_moment(1) * *model.eta.closed_form_power_moment(1);
  return Density(Gaussian{model.f * m0 + model.drift, model.f * model.f + var_eta});
}

std::vector<double> run_moment_filter(const ScenarioConfig& config, const SystemModel& model,
                                      const GridSpec& grid, double m0,
                                      const std::vector<double>& obs, bool power_only,
                                      std::vector<StepRecord>* records) {
  FilterOptions opts;
  opts.order = config.order;
  opts.solver = config.solver;
  opts.power_only = power_only;
  opts.theta_variance_factor = power_only ? 4.0 : 1.0;
  FilterState st = make_initial_state(initial_predictive(model, m0), grid, opts);
  std::vector<double> est;
  est.reserve(obs.size());
  for (double z : obs) {
    st = filter_step(st, z, model, grid, opts);
    // prior mean = f * (posterior mean) + drift, undo to estimate the present
    est.push_back((st.moments.sigma[0] - model.drift) / model.f);
    if (records) records->push_back(StepRecord{st.t, st.fit.p, st.fit.q});
  }
  return est;
}

std::vector<double> run_grid_oracle(const SystemModel& model, const GridSpec& grid, double m0,
                                    const std::vector<double>& obs) {
  GridFunction prior = tabulate(initial_predictive(model, m0), grid);
  normalize(prior, "localization oracle");
  const std::vector<double> w = quadrature_weights(grid);
  std::vector<double> est;
  est.reserve(obs.size());
  for (double z : obs) {
    GridFunction post = prior;
    for (int i = 0; i < grid.nodes; ++i)
      post.values[static_cast<std::size_t>(i)] *= model.eps.eval(z - model.h * grid.node(i));
    normalize(post, "localization oracle posterior");
    double mean = 0.0;
    for (int i = 0; i < grid.nodes; ++i)
      mean += w[static_cast<std::size_t>(i)] * grid.node(i) *
              post.values[static_cast<std::size_t>(i)];
    est.push_back(mean);
    prior = time_update_oracle(post, model.f, model.drift, model.eta, grid);
  }
  return est;
}

}  // namespace

const std::vector<std::string>& known_filters() {
  static const std::vector<std::string> names = {"kf", "pf", "dpbm", "dppm", "oracle"};
  return names;
}

void ScenarioConfig::validate() const {
  const bool known = scenario == "approx1" || scenario == "approx2" || scenario == "approx3" ||
                     scenario == "localize";
  if (!known) throw std::invalid_argument("config: unknown scenario " + scenario);
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("config: order must be even and >= 2");
  if (nodes < 3) throw std::invalid_argument("config: need at least 3 grid nodes");
  if (!(xmin < xmax)) throw std::invalid_argument("config: empty grid interval");
  if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
  if (particles < 1) throw std::invalid_argument("config: particles must be >= 1");
  if (filters.empty()) throw std::invalid_argument("config: select at least one filter");
  if (!(process_std > 0.0) || !std::isfinite(process_std))
    throw std::invalid_argument("config: process_std must be positive");
  if (!(obs_scale > 0.0) || !std::isfinite(obs_scale))
    throw std::invalid_argument("config: obs_scale must be positive");
  if (!(kf_obs_std > 0.0) || !std::isfinite(kf_obs_std))
    throw std::invalid_argument("config: kf_obs_std must be positive");
  if (obs_model != "gumbel" && obs_model != "gaussian")
    throw std::invalid_argument("config: obs_model must be gumbel or gaussian");
  const auto& names = known_filters();
  for (const std::string& f : filters) {
    if (std::find(names.begin(), names.end(), f) == names.end())
      throw std::invalid_argument("config: unknown filter " + f);
    if (std::count(filters.begin(), filters.end(), f) != 1)
      throw std::invalid_argument("config: duplicate filter " + f);
  }
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
  return scenario == other.scenario && order == other.order && xmin == other.xmin &&
         xmax == other.xmax && nodes == other.nodes && runs == other.runs &&
         steps == other.steps && seed == other.seed && filters == other.filters &&
         particles == other.particles && process_std == other.process_std &&
         obs_scale == other.obs_scale && kf_obs_std == other.kf_obs_std &&
         obs_model == other.obs_model && same_solver(solver, other.solver);
}

ScenarioConfig default_approx_config(int example_id) {
  if (example_id < 1 || example_id > 3)
    throw std::invalid_argument("default_approx_config: example id must be 1, 2 or 3");
  // Per example window half widths. The window must cover the visible mass of
  // the mixture, but an order 4 denominator cannot track the reference tails
  // over an arbitrarily wide window, so each example gets the width that
  // minimizes the L1 error of the fitted surrogate.
  static constexpr double kHalfWidth[3] = {4.5, 6.0, 4.0};
  ScenarioConfig config;
  config.scenario = "approx" + std::to_string(example_id);
  config.xmin = -kHalfWidth[example_id - 1];
  config.xmax = kHalfWidth[example_id - 1];
  config.nodes = 2001;
  config.runs = 1;
  config.steps = 1;
  config.filters = {"dpbm", "dppm"};
  config.solver.grad_tol = 1e-8;
  return config;
}

ScenarioConfig default_localization_config() { return ScenarioConfig{}; }

Density example_mixture(int example_id) {
  switch (example_id) {
    case 1:
      return Density(GaussianMixture{{0.5, 0.5}, {2.0, -2.0}, {1.0, 1.0}});
    case 2:
      return Density(GenLogisticMixture{{0.4, 0.6}, {2.0, -2.0}, {2.0, 3.0}});
    case 3:
      return Density(LaplaceMixture{{0.3, 0.7}, {1.0, -1.0}, {0.5, 0.5}});
    default:
      throw std::invalid_argument("example_mixture: example id must be 1, 2 or 3");
  }
}

Density example_reference(int example_id) {
  switch (example_id) {
    case 1:
      return Density(Gaussian{0.0, 25.0});
    case 2:
      return Density(Gaussian{0.90, 5.86 * 5.86});
    case 3:
      return Density(Gaussian{-0.4, 1.5 * 1.5});
    default:
      throw std::invalid_argument("example_reference: example id must be 1, 2 or 3");
  }
}

int count_interior_maxima(const GridFunction& f) {
  int count = 0;
  for (std::size_t i = 1; i + 1 < f.values.size(); ++i)
    if (f.values[i] > f.values[i - 1] && f.values[i] > f.values[i + 1]) ++count;
  return count;
}

RunReport run_approx_example(int example_id, const ScenarioConfig& config) {
  config.validate();
  const std::string expected = "approx" + std::to_string(example_id);
  if (config.scenario != expected)
    throw std::invalid_argument("run_approx_example: config is for scenario " + config.scenario);
  const GridSpec grid = config.grid();
  const Density rho = example_mixture(example_id);
  const Density theta = example_reference(example_id);

  RunReport report;
  report.config = config;
  report.sigma_targets = power_moments(rho, config.order, grid);
  report.xi_targets = generalized_log_moments(rho, theta, config.order, grid);
  report.grid_x.resize(static_cast<std::size_t>(grid.nodes));
  for (int i = 0; i < grid.nodes; ++i) report.grid_x[static_cast<std::size_t>(i)] = grid.node(i);
  report.true_density = tabulate(rho, grid).values;

  {
    Stopwatch sw;
    report.dpbm.params = solve(report.sigma_targets, report.xi_targets, theta, config.order, grid,
                               config.solver, &report.dpbm.report);
    report.dpbm.seconds = sw.seconds();
  }
  {
    Stopwatch sw;
    report.dppm.params = solve_power_only(report.sigma_targets, theta, config.order, grid,
                                          config.solver, &report.dppm.report);
    report.dppm.seconds = sw.seconds();
  }
  finalize_fit(report.dpbm, report.true_density, grid);
  finalize_fit(report.dppm, report.true_density, grid);
  return report;
}

RunReport run_localization(const ScenarioConfig& config) {
  config.validate();
  if (config.scenario != "localize")
    throw std::invalid_argument("run_localization: config is for scenario " + config.scenario);
  const GridSpec grid = config.grid();
  const Density eta(Gaussian{0.0, config.process_std * config.process_std});
  const Density eps = config.obs_model == "gumbel"
                          ? Density(Gumbel{config.obs_scale})
                          : Density(Gaussian{0.0, config.obs_scale * config.obs_scale});
  const SystemModel model{1.0, 1.0, 1.0, eta, eps};
  const int steps = config.steps;

  std::vector<std::string> selected;
  for (const std::string& name : known_filters())
    if (std::find(config.filters.begin(), config.filters.end(), name) != config.filters.end())
      selected.push_back(name);

  RunReport report;
  report.config = config;
  std::map<std::string, std::vector<double>> sq_sum;
  std::map<std::string, int> included;
  for (const std::string& name : selected) {
    sq_sum[name].assign(static_cast<std::size_t>(steps), 0.0);
    included[name] = 0;
    report.filter_seconds[name] = 0.0;
  }

  for (int run = 0; run < config.runs; ++run) {
    const auto stream = static_cast<std::uint64_t>(3 * run);
    Rng rng_world(mix_seed(config.seed, stream));     // truth and observations
    Rng rng_init(mix_seed(config.seed, stream + 1));  // shared initial mean draw
    Rng rng_pf(mix_seed(config.seed, stream + 2));    // particle filter private stream
    const double m0 = rng_init.normal(kStartPosition, 1.0);
    std::vector<double> truth(static_cast<std::size_t>(steps));
    std::vector<double> obs(static_cast<std::size_t>(steps));
    double x = kStartPosition;
    for (int t = 0; t < steps; ++t) {
      x += model.drift + rng_world.normal(0.0, config.process_std);
      truth[static_cast<std::size_t>(t)] = x;
      obs[static_cast<std::size_t>(t)] = x + model.eps.sample(rng_world, 1)[0];
    }
    if (run == 0) {
      report.sample.truth = truth;
      report.sample.observations = obs;
    }

    for (const std::string& name : selected) {
      Stopwatch sw;
      try {
        std::vector<double> est;
        if (name == "kf") {
          est = run_kf(config, m0, obs);
        } else if (name == "pf") {
          est = run_pf(config, model, obs, rng_pf);
        } else if (name == "dpbm") {
          est = run_moment_filter(config, model, grid, m0, obs, false,
                                  run == 0 ? &report.sample.dpbm_steps : nullptr);
        } else if (name == "dppm") {
          est = run_moment_filter(config, model, grid, m0, obs, true, nullptr);
        } else {
          est = run_grid_oracle(model, grid, m0, obs);
        }
        for (int t = 0; t < steps; ++t) {
          const auto ut = static_cast<std::size_t>(t);
          const double e = est[ut] - truth[ut];
          sq_sum[name][ut] += e * e;
        }
        ++included[name];
        if (run == 0) report.sample.estimates[name] = std::move(est);
      } catch (const std::exception& e) {
        report.exclusions.push_back(Exclusion{run, name, e.what()});
        if (name == "dpbm" && run == 0) report.sample.dpbm_steps.clear();
      }
      report.filter_seconds[name] += sw.seconds();
    }
  }

  for (const std::string& name : selected) {
    std::vector<double>& out = report.rmse[name];
    out.assign(static_cast<std::size_t>(steps), 0.0);
    const int n = included[name];
    for (int t = 0; t < steps; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      out[ut] = n > 0 ? std::sqrt(sq_sum[name][ut] / n)
                      : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

}  // namespace momfilt
