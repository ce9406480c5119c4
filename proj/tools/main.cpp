#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "momfilt/baselines.hpp"
#include "momfilt/errors.hpp"
#include "momfilt/experiments.hpp"
#include "momfilt/filter.hpp"
#include "momfilt/moments.hpp"
#include "momfilt/rng.hpp"
#include "momfilt/solver.hpp"

namespace {

using namespace momfilt;

struct Overrides {
  std::string config_path;
  std::optional<int> order, runs, steps, nodes, particles;
  std::optional<double> xmin, xmax;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> filters;
  std::string out;
  std::string format = "both";
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
  sub->add_option("--order", o.order, "number of matched moments per family (even)");
  sub->add_option("--runs", o.runs, "Monte-Carlo runs");
  sub->add_option("--steps", o.steps, "filtering steps per run");
  sub->add_option("--seed", o.seed, "master seed, all randomness derives from it");
  sub->add_option("--filters", o.filters, "filters to run: kf, pf, dpbm, dppm, oracle")
      ->delimiter(',');
  sub->add_option("--particles", o.particles, "particle count for pf");
  sub->add_option("--xmin", o.xmin, "grid lower bound");
  sub->add_option("--xmax", o.xmax, "grid upper bound");
  sub->add_option("--nodes", o.nodes, "grid node count");
  sub->add_option("--out", o.out, "output directory (default $MOMFILT_OUT or ./out)");
  sub->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
}

ScenarioConfig build_config(const ScenarioConfig& defaults, const Overrides& o) {
  ScenarioConfig config = defaults;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) throw std::runtime_error("emit: cannot read config file " + o.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = config_from_json(text.str());
    config.scenario = defaults.scenario;  // the subcommand decides the scenario
  }
  if (o.order) config.order = *o.order;
  if (o.runs) config.runs = *o.runs;
  if (o.steps) config.steps = *o.steps;
  if (o.seed) config.seed = *o.seed;
  if (!o.filters.empty()) config.filters = o.filters;
  if (o.particles) config.particles = *o.particles;
  if (o.xmin) config.xmin = *o.xmin;
  if (o.xmax) config.xmax = *o.xmax;
  if (o.nodes) config.nodes = *o.nodes;
  config.validate();
  return config;
}

std::string output_dir(const Overrides& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("MOMFILT_OUT"); env != nullptr && *env != '\0') return env;
  return "out";
}

EmitFormat parse_format(const std::string& s) {
  if (s == "csv") return EmitFormat::csv;
  if (s == "json") return EmitFormat::json;
  return EmitFormat::both;
}

void print_written(const std::vector<std::string>& paths) {
  for (const std::string& p : paths) std::cout << "wrote " << p << "\n";
}

int run_approx(int example_id, const Overrides& o) {
  const ScenarioConfig config = build_config(default_approx_config(example_id), o);
  const RunReport report = run_approx_example(example_id, config);
  std::cout << "example " << example_id << ": L1(dpbm) = " << report.dpbm.l1_error
            << ", L1(dppm) = " << report.dppm.l1_error << "\n";
  std::cout << "interior maxima: dpbm " << report.dpbm.interior_maxima << ", dppm "
            << report.dppm.interior_maxima << "\n";
  std::cout << "residual inf-norms: dpbm " << report.dpbm.report.grad_inf_norm << ", dppm "
            << report.dppm.report.grad_inf_norm << "\n";
  print_written(emit(report, parse_format(o.format), output_dir(o)));
  return 0;
}

int run_localize(const Overrides& o) {
  const ScenarioConfig config = build_config(default_localization_config(), o);
  const RunReport report = run_localization(config);
  const std::size_t last = static_cast<std::size_t>(config.steps) - 1;
  std::cout << "final-step RMSE over " << config.runs << " runs:";
  for (const std::string& name : known_filters())
    if (report.rmse.count(name) != 0) std::cout << " " << name << " " << report.rmse.at(name)[last];
  std::cout << "\n";
  if (!report.exclusions.empty())
    std::cout << report.exclusions.size() << " run/filter combinations excluded, see report.json\n";
  print_written(emit(report, parse_format(o.format), output_dir(o)));
  return 0;
}

int run_scenario(const std::string& scenario, const Overrides& o) {
  if (scenario == "localize") {
    return run_localize(o);
  }
  if (scenario.rfind("approx", 0) == 0 && scenario.size() == 7) {
    const int id = scenario[6] - '0';
    if (id >= 1 && id <= 3) return run_approx(id, o);
  }
  throw std::invalid_argument("unknown scenario " + scenario);
}

// quick built-in property battery, coarse grids so it stays under a minute
int run_selftest() {
  int failures = 0;
  const auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  const GridSpec grid(-12.0, 12.0, 1201);

  {
    const GridFunction cubic = tabulate(grid, [](double x) { return x * x * x - 2.0 * x + 1.0; });
    check(std::abs(integrate(cubic) - 24.0) < 1e-9, "quadrature integrates a cubic exactly");
  }
  {
    const Density g(Gaussian{1.0, 2.0});
    const GridFunction tab = tabulate(g, grid);
    check(std::abs(integrate(tab) - 1.0) < 1e-9, "gaussian has unit mass on the grid");
    const std::vector<double> m = power_moments(g, 4, grid);
    const double want2 = 2.0 + 1.0;  // variance + mean^2
    check(std::abs(m[1] - want2) < 1e-8, "gaussian second moment matches closed form");
  }
  {
    const Density theta(Gaussian{0.0, 1.0});
    const std::vector<double> sigma = power_moments(theta, 4, grid);
    const std::vector<double> xi = generalized_log_moments(theta, theta, 4, grid);
    SolverReport rep;
    const SurrogateParams fit = solve(sigma, xi, theta, 4, grid, SolverOptions{}, &rep);
    double sup = 0.0;
    const Density fitted = to_density(fit, grid);
    for (int i = 0; i < grid.nodes; ++i)
      sup = std::max(sup, std::abs(fitted.eval(grid.node(i)) - theta.eval(grid.node(i))));
    check(sup < 1e-6, "fit to the reference's own moments returns the reference");
  }
  {
    const GridFunction post =
        measurement_update(Density(Gaussian{0.0, 1.0}), 0.0, 1.0, Density(Gaussian{0.0, 1.0}), grid);
    const Density expect(Gaussian{0.0, 0.5});
    double sup = 0.0;
    for (int i = 0; i < grid.nodes; ++i)
      sup = std::max(sup, std::abs(post.values[static_cast<std::size_t>(i)] -
                                   expect.eval(grid.node(i))));
    check(sup < 1e-8, "conjugate gaussian measurement update");
  }
  {
    const GridFunction post = tabulate(Density(Gaussian{0.0, 1.0}), grid);
    const GridFunction prior = time_update_oracle(post, 1.0, 0.0, Density(Gaussian{0.0, 1.0}), grid);
    const Density expect(Gaussian{0.0, 2.0});
    double sup = 0.0;
    for (int i = 0; i < grid.nodes; ++i)
      sup = std::max(sup, std::abs(prior.values[static_cast<std::size_t>(i)] -
                                   expect.eval(grid.node(i))));
    check(sup < 1e-6, "gaussian time update is the two-variance convolution");
  }
  {
    KalmanState st{0.0, 1.0};
    for (int i = 0; i < 200; ++i) st = kalman_step(st, 0.0, 1.0, 1.0, 0.0, 0.1, 0.2);
    const double p = st.variance;
    const double pred = p + 0.1;
    const double next = (1.0 - pred / (pred + 0.2)) * pred;
    check(std::abs(next - p) < 1e-12, "kalman variance reaches the fixed point");
  }
  {
    Rng a(42), b(42);
    bool same = true;
    for (int i = 0; i < 5; ++i) same = same && a.next_u64() == b.next_u64();
    check(same && mix_seed(1, 0) != mix_seed(1, 1), "seeded generators reproduce and streams differ");
  }
  {
    const ScenarioConfig config = default_localization_config();
    check(config_from_json(config_to_json(config)) == config, "config JSON round-trip");
  }
  std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment-matched Bayesian filtering: density fits and localization experiments"};
  app.require_subcommand(1);
  Overrides o;

  int example_id = 1;
  CLI::App* approx = app.add_subcommand("approx", "fit the density approximation benchmarks");
  approx->add_option("--example", example_id, "benchmark id")->required()->check(CLI::Range(1, 3));
  add_common(approx, o);

  CLI::App* localize = app.add_subcommand("localize", "run the Monte-Carlo localization study");
  add_common(localize, o);

  std::string scenario;
  CLI::App* run = app.add_subcommand("run", "run a scenario by name");
  run->add_option("--scenario", scenario, "approx1 | approx2 | approx3 | localize")->required();
  add_common(run, o);

  app.add_subcommand("selftest", "run a quick built-in property battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("approx")) return run_approx(example_id, o);
    if (app.got_subcommand("localize")) return run_localize(o);
    if (app.got_subcommand("run")) return run_scenario(scenario, o);
    return run_selftest();
  } catch (const ConvergenceError& e) {
    std::cerr << "error (no convergence): " << e.what() << "\n";
    return 4;
  } catch (const PositivityError& e) {
    std::cerr << "error (positivity): " << e.what() << "\n";
    return 4;
  } catch (const DegenerateLikelihoodError& e) {
    std::cerr << "error (degenerate likelihood): " << e.what() << "\n";
    return 5;
  } catch (const CapabilityError& e) {
    std::cerr << "error (unsupported operation): " << e.what() << "\n";
    return 6;
  } catch (const FeasibilityError& e) {
    std::cerr << "error (infeasible moments): " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (bad arguments): " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 7;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
