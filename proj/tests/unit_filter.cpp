#include <cmath>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include "doctest.h"
#include "momfilt/density.hpp"
#include "momfilt/errors.hpp"
#include "momfilt/filter.hpp"
#include "momfilt/grid.hpp"
#include "momfilt/moments.hpp"
#include "test_util.hpp"

using namespace momfilt;

namespace {

SystemModel linear_gaussian_model() {
  return SystemModel{1.0, 1.0, 1.0, Density(Gaussian{0.0, 0.25}), Density(Gaussian{0.0, 0.25})};
}

}  // namespace

TEST_SUITE("filter") {
  TEST_CASE("measurement update matches the conjugate gaussian posterior") {
    const GridSpec grid(-8.0, 8.0, 1601);
    const GridFunction post =
        measurement_update(Density(Gaussian{0.0, 1.0}), 1.0, 1.0, Density(Gaussian{0.0, 0.25}), grid);
    CHECK(std::abs(integrate(post) - 1.0) < 1e-12);
    CHECK(testutil::sup_diff(post, Density(Gaussian{0.8, 0.2})) < 1e-9);

    // observation gain h = 2 rescales the likelihood argument
    const GridFunction post2 =
        measurement_update(Density(Gaussian{0.0, 1.0}), 2.0, 2.0, Density(Gaussian{0.0, 1.0}), grid);
    CHECK(testutil::sup_diff(post2, Density(Gaussian{0.8, 0.2})) < 1e-9);
  }

  TEST_CASE("measurement update with disjoint supports is degenerate") {
    const GridSpec grid(-6.0, 6.0, 1201);
    CHECK_THROWS_AS(measurement_update(Density(Uniform{-1.0, 1.0}), 5.0, 1.0,
                                       Density(Uniform{-0.1, 0.1}), grid),
                    DegenerateLikelihoodError);
  }

  TEST_CASE("time update reproduces gaussian convolutions") {
    const GridSpec grid(-14.0, 16.0, 3001);
    GridFunction post = tabulate(Density(Gaussian{0.0, 1.0}), grid);

    const GridFunction pred1 = time_update_oracle(post, 1.0, 0.5, Density(Gaussian{0.0, 2.0}), grid);
    CHECK(std::abs(integrate(pred1) - 1.0) < 1e-12);
    CHECK(testutil::sup_diff(pred1, Density(Gaussian{0.5, 3.0})) < 1e-6);

    // f = 2 stretches the posterior before the noise is added
    const GridFunction pred2 = time_update_oracle(post, 2.0, 1.0, Density(Gaussian{0.0, 1.0}), grid);
    CHECK(testutil::sup_diff(pred2, Density(Gaussian{1.0, 5.0})) < 1e-5);

    CHECK_THROWS_AS(time_update_oracle(post, 0.0, 0.0, Density(Gaussian{0.0, 1.0}), grid),
                    std::invalid_argument);
  }

  TEST_CASE("initial state wraps the configured density") {
    const GridSpec grid(-20.0, 20.0, 2001);
    const Density init(GaussianMixture{{0.5, 0.5}, {2.0, -2.0}, {1.0, 1.0}});
    FilterOptions opts;
    const FilterState state = make_initial_state(init, grid, opts);
    CHECK(state.t == 0);
    CHECK(state.prior.eval(2.0) == doctest::Approx(init.eval(2.0)).epsilon(1e-14));
    REQUIRE(state.moments.sigma.size() == 4);
    CHECK(std::abs(state.moments.sigma[0]) < 1e-9);
    CHECK(state.moments.sigma[1] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(state.moments.sigma[3] == doctest::Approx(43.0).epsilon(1e-9));
    REQUIRE(state.moments.xi.size() == 4);
    for (double v : state.moments.xi) CHECK(std::isfinite(v));
    const auto& g = std::get<Gaussian>(state.theta.variant());
    CHECK(g.mean == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
    CHECK(g.variance == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(state.fit_report.iterations == 0);

    FilterOptions po = opts;
    po.power_only = true;
    po.theta_variance_factor = 4.0;
    const FilterState ps = make_initial_state(init, grid, po);
    CHECK(ps.moments.xi.empty());
    CHECK(std::get<Gaussian>(ps.theta.variant()).variance == doctest::Approx(20.0).epsilon(1e-8));
  }

  TEST_CASE("filter step follows the kalman recursion on a linear gaussian model") {
    const GridSpec grid(-10.0, 14.0, 2401);
    const SystemModel model = linear_gaussian_model();
    FilterOptions opts;
    FilterState state = make_initial_state(Density(Gaussian{0.0, 1.0}), grid, opts);

    state = filter_step(state, 0.5, model, grid, opts);
    CHECK(state.t == 1);
    // posterior N(0.4, 0.2), predicted N(1.4, 0.45)
    CHECK((state.moments.sigma[0] - model.drift) / model.f == doctest::Approx(0.4).epsilon(1e-8));
    CHECK(state.moments.sigma[0] == doctest::Approx(1.4).epsilon(1e-8));
    const double var1 = state.moments.sigma[1] - state.moments.sigma[0] * state.moments.sigma[0];
    CHECK(var1 == doctest::Approx(0.45).epsilon(1e-7));
    CHECK(state.fit_report.grad_inf_norm <= 1e-6);
    CHECK(testutil::sup_diff(state.prior, Density(Gaussian{1.4, 0.45}), grid) < 1e-5);
    for (double c : state.fit.p) CHECK(std::abs(c) < 1e-4);

    state = filter_step(state, 2.0, model, grid, opts);
    CHECK(state.t == 2);
    CHECK((state.moments.sigma[0] - model.drift) / model.f ==
          doctest::Approx(1.7857142857142858).epsilon(1e-7));
    const double var2 = state.moments.sigma[1] - state.moments.sigma[0] * state.moments.sigma[0];
    CHECK(var2 == doctest::Approx(0.41071428571428575).epsilon(1e-6));
    CHECK(testutil::sup_diff(state.prior, Density(Gaussian{2.7857142857142858, 0.41071428571428575}),
                             grid) < 1e-5);
  }

  TEST_CASE("power only step skips log moments and inflates the reference") {
    const GridSpec grid(-10.0, 14.0, 2401);
    const SystemModel model = linear_gaussian_model();
    FilterOptions opts;
    opts.power_only = true;
    opts.theta_variance_factor = 4.0;
    FilterState state = make_initial_state(Density(Gaussian{0.0, 1.0}), grid, opts);
    state = filter_step(state, 0.5, model, grid, opts);
    CHECK(state.moments.xi.empty());
    CHECK(std::get<Gaussian>(state.theta.variant()).variance ==
          doctest::Approx(4.0 * 0.45).epsilon(1e-6));
    for (double c : state.fit.p) CHECK(c == 0.0);
    const std::vector<double> fitted = power_moments(state.prior, 4, grid);
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::abs(fitted[k] - state.moments.sigma[k]) <=
            1e-5 * std::max(1.0, std::abs(state.moments.sigma[k])));
  }

  TEST_CASE("grid filter run tracks the kalman closed form") {
    const GridSpec grid(-10.0, 14.0, 2401);
    const SystemModel model = linear_gaussian_model();
    const std::vector<GridFunction> priors =
        grid_filter_run(model, {0.5, 2.0}, Density(Gaussian{0.0, 1.0}), grid);
    REQUIRE(priors.size() == 3);
    for (const GridFunction& f : priors) CHECK(std::abs(integrate(f) - 1.0) < 1e-12);
    CHECK(testutil::sup_diff(priors[0], Density(Gaussian{0.0, 1.0})) < 1e-9);
    CHECK(testutil::sup_diff(priors[1], Density(Gaussian{1.4, 0.45})) < 1e-6);
    CHECK(testutil::sup_diff(priors[2],
                             Density(Gaussian{2.7857142857142858, 0.41071428571428575})) < 1e-6);
  }

  TEST_CASE("surrogate priors track the exact filter under skewed noise") {
    const GridSpec grid(-15.0, 10.0, 2001);
    const SystemModel model{1.0, 1.0, 1.0, Density(Gaussian{0.0, 0.0009}),
                            Density(Gumbel{0.25})};
    const Density init(Gaussian{-7.0, 1.0});
    const std::vector<double> obs = {-5.85, -4.88};

    const std::vector<GridFunction> exact = grid_filter_run(model, obs, init, grid);
    FilterOptions opts;
    FilterState state = make_initial_state(init, grid, opts);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      state = filter_step(state, obs[k], model, grid, opts);
      const std::vector<double> got = power_moments(state.prior, 4, grid);
      const std::vector<double> want = power_moments(exact[k + 1], 4);
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::abs(got[j] - want[j]) <= 0.05 * std::max(1.0, std::abs(want[j])));
      const std::vector<double> got_xi =
          generalized_log_moments(state.prior, state.theta, 4, grid);
      const std::vector<double> want_xi = generalized_log_moments(exact[k + 1], state.theta, 4);
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::abs(got_xi[j] - want_xi[j]) <= 0.05 * std::max(1.0, std::abs(want_xi[j])));
    }
    CHECK(state.t == 2);
  }
}
