#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "momfilt/experiments.hpp"

namespace momfilt {
namespace {

using ordered_json = nlohmann::ordered_json;

// fixed-format doubles keep the CSV byte-identical across reruns
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("emit: failed writing " + path.string());
}

ordered_json config_json(const ScenarioConfig& c) {
  ordered_json j;
  j["scenario"] = c.scenario;
  j["order"] = c.order;
  j["grid"] = {{"xmin", c.xmin}, {"xmax", c.xmax}, {"nodes", c.nodes}};
  j["runs"] = c.runs;
  j["steps"] = c.steps;
  j["seed"] = c.seed;
  j["filters"] = c.filters;
  j["particles"] = c.particles;
  j["noise"] = {{"process_std", c.process_std},
                {"obs_scale", c.obs_scale},
                {"kf_obs_std", c.kf_obs_std},
                {"obs_model", c.obs_model}};
  j["solver"] = {{"max_iterations", c.solver.max_iterations},
                 {"grad_tol", c.solver.grad_tol},
                 {"armijo_slope", c.solver.armijo_slope},
                 {"backtrack", c.solver.backtrack}};
  return j;
}

ordered_json fit_json(const FitSummary& fit) {
  ordered_json j;
  j["p"] = fit.params.p;
  j["q"] = fit.params.q;
  if (fit.params.theta && std::holds_alternative<Gaussian>(fit.params.theta->variant())) {
    const auto& g = std::get<Gaussian>(fit.params.theta->variant());
    j["theta"] = {{"mean", g.mean}, {"variance", g.variance}};
  }
  j["iterations"] = fit.report.iterations;
  j["residual_inf_norm"] = fit.report.grad_inf_norm;
  j["objective"] = fit.report.objective;
  j["sigma_residual"] = fit.report.sigma_residual;
  j["xi_residual"] = fit.report.xi_residual;
  j["l1_error"] = fit.l1_error;
  j["interior_maxima"] = fit.interior_maxima;
  return j;
}

std::vector<std::string> rmse_columns(const RunReport& report) {
  std::vector<std::string> cols;
  for (const std::string& name : known_filters())
    if (report.rmse.count(name) != 0) cols.push_back(name);
  return cols;
}

std::string density_csv(const RunReport& report) {
  std::string text = "x,true,dpbm,dppm\n";
  for (std::size_t i = 0; i < report.grid_x.size(); ++i) {
    text += fmt(report.grid_x[i]);
    text += ',';
    text += fmt(report.true_density[i]);
    text += ',';
    text += fmt(report.dpbm.density[i]);
    text += ',';
    text += fmt(report.dppm.density[i]);
    text += '\n';
  }
  return text;
}

std::string rmse_csv(const RunReport& report) {
  const std::vector<std::string> cols = rmse_columns(report);
  std::string text = "t";
  for (const std::string& name : cols) {
    text += ',';
    text += name;
  }
  text += '\n';
  for (int t = 1; t <= report.config.steps; ++t) {
    text += std::to_string(t);
    for (const std::string& name : cols) {
      text += ',';
      text += fmt(report.rmse.at(name)[static_cast<std::size_t>(t - 1)]);
    }
    text += '\n';
  }
  return text;
}

std::string report_json(const RunReport& report, bool approx) {
  ordered_json j;
  j["schema"] = approx ? "approx" : "localize";
  j["seed"] = report.config.seed;
  j["config"] = config_json(report.config);
  if (approx) {
    j["targets"] = {{"sigma", report.sigma_targets}, {"xi", report.xi_targets}};
    j["dpbm"] = fit_json(report.dpbm);
    j["dppm"] = fit_json(report.dppm);
  } else {
    ordered_json rmse;
    std::vector<int> ts(static_cast<std::size_t>(report.config.steps));
    for (int t = 1; t <= report.config.steps; ++t) ts[static_cast<std::size_t>(t - 1)] = t;
    rmse["t"] = ts;
    for (const std::string& name : rmse_columns(report)) rmse[name] = report.rmse.at(name);
    j["rmse"] = rmse;
    ordered_json excluded = ordered_json::array();
    for (const Exclusion& e : report.exclusions)
      excluded.push_back({{"run", e.run}, {"filter", e.filter}, {"message", e.message}});
    j["excluded"] = excluded;
    ordered_json sample;
    sample["truth"] = report.sample.truth;
    sample["observations"] = report.sample.observations;
    ordered_json est;
    for (const std::string& name : rmse_columns(report))
      if (report.sample.estimates.count(name) != 0) est[name] = report.sample.estimates.at(name);
    sample["estimates"] = est;
    ordered_json steps = ordered_json::array();
    for (const StepRecord& r : report.sample.dpbm_steps)
      steps.push_back({{"t", r.t}, {"p", r.p}, {"q", r.q}});
    sample["dpbm_steps"] = steps;
    j["sample"] = sample;
  }
  return j.dump(2) + "\n";
}

std::string timings_json(const RunReport& report, bool approx) {
  ordered_json j;
  j["schema"] = approx ? "approx" : "localize";
  ordered_json seconds;
  if (approx) {
    seconds["dpbm_fit"] = report.dpbm.seconds;
    seconds["dppm_fit"] = report.dppm.seconds;
  } else {
    const double denom = static_cast<double>(report.config.runs) *
                         static_cast<double>(report.config.steps);
    for (const std::string& name : rmse_columns(report)) {
      const double total = report.filter_seconds.count(name) != 0
                               ? report.filter_seconds.at(name)
                               : 0.0;
      seconds[name] = {{"total", total}, {"per_step", total / denom}};
    }
  }
  j["seconds"] = seconds;
  return j.dump(2) + "\n";
}

}  // namespace

std::string config_to_json(const ScenarioConfig& config) {
  return config_json(config).dump(2) + "\n";
}

ScenarioConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ScenarioConfig c;
  c.scenario = j.value("scenario", c.scenario);
  c.order = j.value("order", c.order);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.xmin = g.value("xmin", c.xmin);
    c.xmax = g.value("xmax", c.xmax);
    c.nodes = g.value("nodes", c.nodes);
  }
  c.runs = j.value("runs", c.runs);
  c.steps = j.value("steps", c.steps);
  c.seed = j.value("seed", c.seed);
  if (j.contains("filters")) c.filters = j.at("filters").get<std::vector<std::string>>();
  c.particles = j.value("particles", c.particles);
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    c.process_std = n.value("process_std", c.process_std);
    c.obs_scale = n.value("obs_scale", c.obs_scale);
    c.kf_obs_std = n.value("kf_obs_std", c.kf_obs_std);
    c.obs_model = n.value("obs_model", c.obs_model);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
    c.solver.grad_tol = s.value("grad_tol", c.solver.grad_tol);
    c.solver.armijo_slope = s.value("armijo_slope", c.solver.armijo_slope);
    c.solver.backtrack = s.value("backtrack", c.solver.backtrack);
  }
  c.validate();
  return c;
}

std::vector<std::string> emit(const RunReport& report, EmitFormat format, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit: cannot create directory " + dir + ": " + ec.message());
  const fs::path base(dir);
  const bool approx = !report.true_density.empty();
  std::vector<std::string> written;
  if (format != EmitFormat::json) {
    const fs::path p = base / (approx ? "density.csv" : "rmse.csv");
    write_file(p, approx ? density_csv(report) : rmse_csv(report));
    written.push_back(p.string());
  }
  if (format != EmitFormat::csv) {
    const fs::path rp = base / "report.json";
    write_file(rp, report_json(report, approx));
    written.push_back(rp.string());
    const fs::path tp = base / "timings.json";
    write_file(tp, timings_json(report, approx));
    written.push_back(tp.string());
  }
  return written;
}

}  // namespace momfilt
