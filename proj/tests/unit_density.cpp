#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "momfilt/density.hpp"
#include "momfilt/errors.hpp"
#include "momfilt/grid.hpp"
#include "momfilt/moments.hpp"
#include "momfilt/rng.hpp"
#include "test_util.hpp"

using namespace momfilt;

namespace {

double sample_mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_var(const std::vector<double>& xs) {
  const double m = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("gaussian point values and log consistency") {
    const Density g(Gaussian{0.0, 1.0});
    CHECK(g.eval(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    for (double x : {-3.0, -0.7, 0.0, 1.3, 4.0})
      CHECK(g.log_eval(x) == doctest::Approx(std::log(g.eval(x))).epsilon(1e-12));
    CHECK_THROWS_AS(Density(Gaussian{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Density(Gaussian{0.0, -1.0}), std::invalid_argument);
  }

  TEST_CASE("mixture weights must be a probability vector") {
    CHECK_THROWS_AS(Density(GaussianMixture{{0.5, 0.6}, {0.0, 1.0}, {1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Density(GaussianMixture{{1.5, -0.5}, {0.0, 1.0}, {1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Density(GaussianMixture{{0.5, 0.5}, {0.0}, {1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_NOTHROW(Density(GaussianMixture{{0.5, 0.5}, {0.0, 1.0}, {1.0, 1.0}}));
  }

  TEST_CASE("laplace mixture evaluates the double exponential") {
    const Density d(LaplaceMixture{{1.0}, {0.0}, {1.0}});
    CHECK(d.eval(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.eval(1.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(d.log_eval(-2.0) == doctest::Approx(std::log(0.5) - 2.0).epsilon(1e-12));
  }

  TEST_CASE("generalized logistic evaluates and stays finite in the tails") {
    const Density d(GenLogisticMixture{{1.0}, {0.0}, {2.0}});
    CHECK(d.eval(0.0) == doctest::Approx(0.25).epsilon(1e-14));
    // left tail behaves like alpha * exp(alpha x); the log must not overflow
    CHECK(d.log_eval(-300.0) == doctest::Approx(std::log(2.0) - 600.0).epsilon(1e-9));
    CHECK(std::isfinite(d.log_eval(300.0)));
    CHECK(d.log_eval(1.7) == doctest::Approx(std::log(d.eval(1.7))).epsilon(1e-12));
  }

  TEST_CASE("gumbel density matches its closed form") {
    const Density d(Gumbel{0.25});
    CHECK(d.eval(0.0) == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(d.log_eval(0.5) == doctest::Approx(std::log(d.eval(0.5))).epsilon(1e-12));
    // far left the double exponential crushes the density; log stays finite
    CHECK(std::isfinite(d.log_eval(-3.0)));
    CHECK(d.log_eval(-3.0) < -1e4);
  }

  TEST_CASE("uniform density has hard support edges") {
    const Density d(Uniform{-2.0, 3.0});
    CHECK(d.eval(0.0) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(d.eval(-2.5) == 0.0);
    CHECK(d.log_eval(4.0) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("rational surrogate reduces to theta for trivial coefficients") {
    auto theta = std::make_shared<Density>(Gaussian{0.0, 1.0});
    const Density d(RationalSurrogate{{0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0}, theta});
    for (double x : {-2.0, 0.0, 1.5})
      CHECK(d.eval(x) == doctest::Approx(theta->eval(x)).epsilon(1e-14));
  }

  TEST_CASE("rational surrogate rejects nonpositive polynomials") {
    auto theta = std::make_shared<Density>(Gaussian{0.0, 1.0});
    // Q(x) = x is negative left of the origin
    const Density d(RationalSurrogate{{0.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0, 0.0}, theta});
    CHECK_THROWS_AS(d.eval(-1.0), PositivityError);
    CHECK_THROWS_AS(validate_surrogate_positivity(
                        RationalSurrogate{{0.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0, 0.0}, theta},
                        GridSpec(-5.0, 5.0, 101)),
                    PositivityError);
    CHECK_THROWS_AS(Density(RationalSurrogate{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0}, theta}),
                    std::invalid_argument);  // numerator/denominator degree mismatch
  }

  TEST_CASE("grid tabulated density renormalizes and floors its log") {
    const GridSpec g(-6.0, 6.0, 301);
    GridFunction raw = tabulate(Density(Gaussian{0.0, 1.0}), g);
    for (double& v : raw.values) v *= 7.0;  // arbitrary positive scaling
    const Density d(GridTabulated{raw});
    CHECK(d.eval(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-4));
    CHECK(std::isfinite(d.log_eval(200.0)));  // outside the table, floored
    CHECK(d.log_eval(200.0) < -600.0);
  }

  TEST_CASE("sampling is reproducible for equal seeds") {
    const Density d(Gumbel{0.25});
    Rng a(7), b(7);
    CHECK(d.sample(a, 5) == d.sample(b, 5));
  }

  TEST_CASE("sample statistics match quadrature moments") {
    const int n = 100000;
    struct Case {
      Density d;
      GridSpec g;  // aligned to the support so quadrature sees a smooth integrand
      double tol_mean, tol_var;
    };
    const std::vector<Case> cases = {
        {Density(Gaussian{0.5, 2.0}), GridSpec(-30.0, 30.0, 6001), 0.02, 0.1},
        {Density(LaplaceMixture{{1.0}, {1.0}, {2.0}}), GridSpec(-50.0, 50.0, 10001), 0.04, 0.3},
        {Density(GenLogisticMixture{{1.0}, {0.0}, {2.0}}), GridSpec(-40.0, 40.0, 8001), 0.03, 0.1},
        {Density(Gumbel{0.25}), GridSpec(-3.0, 10.0, 2601), 0.005, 0.01},
        {Density(Uniform{-8.0, 8.0}), GridSpec(-8.0, 8.0, 1601), 0.06, 0.3},
    };
    int stream = 0;
    for (const Case& c : cases) {
      Rng rng(mix_seed(20250823, static_cast<std::uint64_t>(stream++)));
      const std::vector<double> xs = c.d.sample(rng, n);
      const GridFunction tab = tabulate(c.d, c.g);
      const double mass = integrate(tab);
      const double mean = integrate_moment(tab, 1) / mass;
      const double var = integrate_moment(tab, 2) / mass - mean * mean;
      CHECK(std::abs(sample_mean(xs) - mean) < c.tol_mean);
      CHECK(std::abs(sample_var(xs) - var) < c.tol_var);
    }
  }

  TEST_CASE("mixture sampling weights the components") {
    const Density d(GaussianMixture{{0.25, 0.75}, {-5.0, 5.0}, {1.0, 1.0}});
    Rng rng(3);
    const std::vector<double> xs = d.sample(rng, 40000);
    int right = 0;
    for (double x : xs)
      if (x > 0.0) ++right;
    CHECK(std::abs(right / 40000.0 - 0.75) < 0.01);
  }

  TEST_CASE("closed form power moments agree with quadrature") {
    const std::vector<std::pair<Density, GridSpec>> cases = {
        {Density(Gaussian{1.0, 4.0}), GridSpec(-40.0, 40.0, 8001)},
        {Density(GaussianMixture{{0.5, 0.5}, {2.0, -2.0}, {1.0, 1.0}}), GridSpec(-40.0, 40.0, 8001)},
        {Density(LaplaceMixture{{0.3, 0.7}, {1.0, -1.0}, {0.5, 0.5}}), GridSpec(-30.0, 30.0, 12001)},
        {Density(Gumbel{0.25}), GridSpec(-3.0, 12.0, 3001)},
        {Density(Uniform{-2.0, 5.0}), GridSpec(-2.0, 5.0, 1401)},
    };
    for (const auto& [d, g] : cases) {
      const GridFunction tab = tabulate(d, g);
      for (int k = 0; k <= 6; ++k) {
        const auto m = d.closed_form_power_moment(k);
        REQUIRE(m.has_value());
        CHECK(testutil::rel_err(*m, integrate_moment(tab, k)) < 1e-6);
      }
    }
  }

  TEST_CASE("gumbel closed moments carry the euler constant") {
    const Density d(Gumbel{0.25});
    CHECK(*d.closed_form_power_moment(1) == doctest::Approx(0.14430391622538322).epsilon(1e-13));
    const double var = *d.closed_form_power_moment(2) -
                       *d.closed_form_power_moment(1) * *d.closed_form_power_moment(1);
    CHECK(var == doctest::Approx(0.10280837917801415).epsilon(1e-12));
  }

  TEST_CASE("densities without closed moments or direct sampling say so") {
    const Density gl(GenLogisticMixture{{1.0}, {0.0}, {2.0}});
    CHECK_FALSE(gl.closed_form_power_moment(2).has_value());
    auto theta = std::make_shared<Density>(Gaussian{0.0, 1.0});
    const Density surrogate(
        RationalSurrogate{{0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0}, theta});
    CHECK_FALSE(surrogate.closed_form_power_moment(2).has_value());
    Rng rng(1);
    CHECK_THROWS_AS(surrogate.sample(rng, 3), CapabilityError);
  }
}
