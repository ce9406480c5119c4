#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "doctest.h"
#include "momfilt/density.hpp"
#include "momfilt/errors.hpp"
#include "momfilt/experiments.hpp"
#include "momfilt/grid.hpp"
#include "test_util.hpp"

using namespace momfilt;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("config validation guards every field") {
    ScenarioConfig c;
    CHECK_NOTHROW(c.validate());
    auto expect_invalid = [](ScenarioConfig bad) {
      CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    };
    {
      ScenarioConfig bad = c;
      bad.scenario = "approx9";
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.order = 3;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.nodes = 2;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.xmin = bad.xmax;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.runs = 0;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.steps = 0;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.particles = 0;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.filters = {};
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.filters = {"kf", "ekf"};
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.filters = {"kf", "kf"};
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.process_std = 0.0;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.obs_scale = -1.0;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.kf_obs_std = 0.0;
      expect_invalid(bad);
    }
    {
      ScenarioConfig bad = c;
      bad.obs_model = "cauchy";
      expect_invalid(bad);
    }
  }

  TEST_CASE("config json round trip preserves every field") {
    ScenarioConfig c = default_localization_config();
    c.filters = {"kf", "dpbm"};
    c.seed = 99;
    c.obs_model = "gaussian";
    c.obs_scale = 0.15;
    c.kf_obs_std = 0.2;
    c.process_std = 0.001;
    c.particles = 1234;
    c.solver.grad_tol = 1e-7;
    const ScenarioConfig back = config_from_json(config_to_json(c));
    CHECK(back == c);

    CHECK(config_from_json("{}") == ScenarioConfig{});
    CHECK_THROWS_AS(config_from_json(R"({"runs": 0})"), std::invalid_argument);
    CHECK_THROWS(config_from_json("not json"));
  }

  TEST_CASE("example densities carry their published constants") {
    CHECK(example_mixture(1).eval(0.0) == doctest::Approx(0.05399096651318806).epsilon(1e-12));
    CHECK(example_mixture(3).eval(0.0) == doctest::Approx(0.1353352832366127).epsilon(1e-12));
    CHECK(std::isfinite(example_mixture(2).eval(0.0)));
    CHECK(std::get<Gaussian>(example_reference(1).variant()).variance == 25.0);
    CHECK(std::get<Gaussian>(example_reference(2).variant()).variance ==
          doctest::Approx(34.3396).epsilon(1e-12));
    CHECK(std::get<Gaussian>(example_reference(3).variant()).mean == -0.4);
    CHECK_THROWS_AS(example_mixture(0), std::invalid_argument);
    CHECK_THROWS_AS(example_reference(4), std::invalid_argument);
    CHECK_THROWS_AS(default_approx_config(5), std::invalid_argument);
  }

  TEST_CASE("runner and scenario must agree") {
    CHECK_THROWS_AS(run_approx_example(1, default_localization_config()), std::invalid_argument);
    CHECK_THROWS_AS(run_approx_example(2, default_approx_config(1)), std::invalid_argument);
    CHECK_THROWS_AS(run_localization(default_approx_config(1)), std::invalid_argument);
  }

  TEST_CASE("interior maxima are counted strictly") {
    const GridSpec g(0.0, 4.0, 5);
    CHECK(count_interior_maxima(GridFunction{g, {0.0, 1.0, 0.0, 2.0, 0.0}}) == 2);
    CHECK(count_interior_maxima(GridFunction{g, {0.0, 1.0, 2.0, 3.0, 4.0}}) == 0);
    CHECK(count_interior_maxima(GridFunction{g, {0.0, 1.0, 1.0, 0.5, 0.0}}) == 0);
  }

  TEST_CASE("bimodal benchmark prefers the full fit") {
    const RunReport report = run_approx_example(1, default_approx_config(1));
    REQUIRE(report.grid_x.size() == 2001);
    REQUIRE(report.true_density.size() == 2001);
    REQUIRE(report.dpbm.density.size() == 2001);
    CHECK(std::abs(report.sigma_targets[0]) < 1e-7);
    CHECK(report.sigma_targets[1] == doctest::Approx(5.0).epsilon(1e-7));
    CHECK(report.sigma_targets[3] == doctest::Approx(43.0).epsilon(1e-7));
    CHECK(report.dpbm.report.grad_inf_norm <= 1e-6);
    CHECK(report.dppm.report.grad_inf_norm <= 1e-6);
    CHECK(report.dpbm.l1_error < report.dppm.l1_error);
    CHECK(report.dpbm.interior_maxima == 2);
    CHECK(report.dpbm.seconds > 0.0);
  }

  TEST_CASE("small localization run is complete and self consistent") {
    ScenarioConfig c;
    c.scenario = "localize";
    c.xmin = -15.0;
    c.xmax = 5.0;
    c.nodes = 801;
    c.runs = 2;
    c.steps = 3;
    c.particles = 500;
    c.filters = {"kf", "pf", "dpbm", "oracle"};
    const RunReport report = run_localization(c);

    CHECK(report.exclusions.empty());
    for (const std::string& name : c.filters) {
      REQUIRE(report.rmse.count(name) == 1);
      const std::vector<double>& r = report.rmse.at(name);
      REQUIRE(r.size() == 3);
      for (double v : r) {
        CHECK(std::isfinite(v));
        CHECK(v < 1.5);
      }
      REQUIRE(report.sample.estimates.count(name) == 1);
      CHECK(report.sample.estimates.at(name).size() == 3);
      CHECK(report.filter_seconds.at(name) >= 0.0);
    }
    CHECK(report.sample.truth.size() == 3);
    CHECK(report.sample.observations.size() == 3);
    REQUIRE(report.sample.dpbm_steps.size() == 3);
    for (const StepRecord& s : report.sample.dpbm_steps) {
      CHECK(s.p.size() == 4);
      CHECK(s.q.size() == 5);
    }
    // the surrogate filter should shadow the exact grid filter closely
    for (std::size_t t = 0; t < 3; ++t)
      CHECK(std::abs(report.sample.estimates.at("dpbm")[t] -
                     report.sample.estimates.at("oracle")[t]) < 0.05);

    const RunReport again = run_localization(c);
    CHECK(again.rmse == report.rmse);
    CHECK(again.sample.truth == report.sample.truth);
  }

  TEST_CASE("near zero process noise pins every filter to the truth") {
    // An even node count selects trapezoid weights, for which the delta-like
    // process convolution is an exact one-node-per-drift shift; a Gaussian
    // observation model keeps the Kalman baseline exactly matched.
    ScenarioConfig c;
    c.scenario = "localize";
    c.xmin = -12.0;
    c.xmax = 38.05;
    c.nodes = 1002;  // spacing 0.05, drift lands 20 nodes away
    c.runs = 3;
    c.steps = 40;
    c.particles = 2000;
    c.filters = {"kf", "pf", "dpbm"};
    c.process_std = 1e-6;
    c.obs_model = "gaussian";
    c.obs_scale = 0.15;
    c.kf_obs_std = 0.15;
    const RunReport report = run_localization(c);
    CHECK(report.exclusions.empty());
    const double h = c.grid().spacing();
    for (const std::string& name : c.filters) {
      const std::vector<double>& r = report.rmse.at(name);
      REQUIRE(r.size() == 40);
      CHECK(r.back() <= h);
    }
  }

  TEST_CASE("emitted artifacts are byte stable across reruns") {
    ScenarioConfig c = default_approx_config(1);
    c.nodes = 401;
    const RunReport a = run_approx_example(1, c);
    const RunReport b = run_approx_example(1, c);
    TempDir da("momfilt_emit_a"), db("momfilt_emit_b");
    const std::vector<std::string> pa = emit(a, EmitFormat::both, da.path.string());
    const std::vector<std::string> pb = emit(b, EmitFormat::both, db.path.string());
    REQUIRE(pa.size() == 3);
    REQUIRE(pb.size() == 3);
    CHECK(slurp(pa[0]) == slurp(pb[0]));  // density.csv
    CHECK(slurp(pa[1]) == slurp(pb[1]));  // report.json
    CHECK(slurp(pa[0]).rfind("x,true,dpbm,dppm\n", 0) == 0);

    // csv-only emission writes a single file
    TempDir dc("momfilt_emit_c");
    const std::vector<std::string> pc = emit(a, EmitFormat::csv, dc.path.string());
    CHECK(pc.size() == 1);
  }

  TEST_CASE("localization emission uses the rmse layout") {
    ScenarioConfig c;
    c.scenario = "localize";
    c.xmin = -15.0;
    c.xmax = 5.0;
    c.nodes = 481;
    c.runs = 1;
    c.steps = 2;
    c.particles = 200;
    c.filters = {"kf", "pf"};
    const RunReport report = run_localization(c);
    TempDir dir("momfilt_emit_rmse");
    const std::vector<std::string> paths = emit(report, EmitFormat::both, dir.path.string());
    REQUIRE(paths.size() == 3);
    const std::string csv = slurp(paths[0]);
    CHECK(csv.rfind("t,kf,pf\n", 0) == 0);
    const std::string json = slurp(paths[1]);
    CHECK(json.find("\"schema\": \"localize\"") != std::string::npos);
  }
}
