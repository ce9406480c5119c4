#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "momfilt/grid.hpp"
#include "momfilt/rng.hpp"

namespace momfilt {

class Density;

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};

struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
};

// component k: (1 / (2 b_k)) * exp(-|x - a_k| / b_k)
struct LaplaceMixture {
  std::vector<double> weights;
  std::vector<double> locations;
  std::vector<double> scales;
};

// type-I generalized logistic component with shape a and shift c:
//   a * exp(-(x - c)) / (1 + exp(-(x - c)))^(a + 1)
struct GenLogisticMixture {
  std::vector<double> weights;
  std::vector<double> shifts;
  std::vector<double> shapes;
};

// (1 / b) * exp(-x / b - exp(-x / b)); right-skewed, mode at 0
struct Gumbel {
  double scale = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

// P(x) theta(x) / Q(x) with P(x) = 1 + sum p[k-1] x^k and Q(x) = sum q[k] x^k.
// Both polynomials must stay strictly positive wherever the density is read.
struct RationalSurrogate {
  std::vector<double> p;  // degrees 1..2n, constant term fixed at 1
  std::vector<double> q;  // degrees 0..2n
  std::shared_ptr<const Density> theta;
};

// Nonnegative samples normalized at construction to unit trapezoid integral;
// evaluation is piecewise linear, zero outside the grid.
struct GridTabulated {
  GridFunction table;
};

class Density {
 public:
  using Variant = std::variant<Gaussian, GaussianMixture, LaplaceMixture, GenLogisticMixture,
                               Gumbel, Uniform, RationalSurrogate, GridTabulated>;

  Density(Variant v);  // NOLINT: implicit by design, validates invariants

  double eval(double x) const;
  double log_eval(double x) const;

  // n independent draws; analytic variants only
  std::vector<double> sample(Rng& rng, int n) const;

  // Exact raw moment E[x^k] for Gaussian, GaussianMixture, LaplaceMixture,
  // Gumbel and Uniform; nullopt for the other variants.
  std::optional<double> closed_form_power_moment(int k) const;

  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

GridFunction tabulate(const Density& d, const GridSpec& grid);

// Throws PositivityError unless P and Q are strictly positive at every node.
void validate_surrogate_positivity(const RationalSurrogate& s, const GridSpec& grid);

}  // namespace momfilt
