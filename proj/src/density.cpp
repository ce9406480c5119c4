#include "momfilt/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "momfilt/errors.hpp"
#include "momfilt/polynomial.hpp"

namespace momfilt {
namespace {

constexpr double kLogFloor = 1e-300;
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_weights(const std::vector<double>& w, std::size_t n_components) {
  require(!w.empty() && w.size() == n_components, "mixture: component count mismatch");
  double sum = 0.0;
  for (double wi : w) {
    require(std::isfinite(wi) && wi > 0.0, "mixture: weights must be positive");
    sum += wi;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "mixture: weights must sum to 1");
}

double gaussian_log(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(kTwoPi * variance) - d * d / (2.0 * variance);
}

// log of a * e^{-y} / (1 + e^{-y})^{a+1}, evaluated stably for large |y|
double gen_logistic_log(double y, double shape) {
  const double soft = (y > 0.0) ? std::log1p(std::exp(-y)) : -y + std::log1p(std::exp(y));
  return std::log(shape) - y - (shape + 1.0) * soft;
}

double gaussian_raw_moment(double mean, double variance, int k) {
  // m_k = mean * m_{k-1} + (k - 1) * variance * m_{k-2}
  double prev = 1.0, cur = mean;
  if (k == 0) return prev;
  for (int j = 2; j <= k; ++j) {
    const double next = mean * cur + (j - 1) * variance * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double laplace_raw_moment(double loc, double scale, int k) {
  // E[(x - loc)^j] = j! scale^j for even j, 0 for odd j
  double acc = 0.0;
  double fact = 1.0, spow = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) {
      fact *= j;
      spow *= scale;
    }
    if (j % 2 == 0) acc += binomial(k, j) * std::pow(loc, k - j) * fact * spow;
  }
  return acc;
}

double gumbel_raw_moment(double scale, int k) {
  // cumulants: k1 = gamma*b, kn = (n-1)! zeta(n) b^n; then the standard
  // cumulant-to-moment recursion
  std::vector<double> kappa(static_cast<std::size_t>(k) + 1, 0.0);
  double bpow = scale;
  double fact = 1.0;
  for (int n = 1; n <= k; ++n) {
    if (n == 1) {
      kappa[1] = kEulerGamma * scale;
    } else {
      fact *= (n - 1);
      kappa[static_cast<std::size_t>(n)] = fact * std::riemann_zeta(static_cast<double>(n)) * bpow;
    }
    bpow *= scale;
  }
  std::vector<double> m(static_cast<std::size_t>(k) + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= k; ++n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += binomial(n - 1, i) * kappa[static_cast<std::size_t>(i + 1)] * m[static_cast<std::size_t>(n - 1 - i)];
    m[static_cast<std::size_t>(n)] = acc;
  }
  return m[static_cast<std::size_t>(k)];
}

double draw_uniform_below_one(Rng& rng) {
  double u = rng.uniform01();
  while (u > 1.0 - 1e-16) u = rng.uniform01();
  return u;
}

int pick_component(const std::vector<double>& weights, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

struct Validator {
  void operator()(const Gaussian& g) const {
    require(std::isfinite(g.mean), "Gaussian: mean must be finite");
    require(std::isfinite(g.variance) && g.variance > 0.0, "Gaussian: variance must be positive");
  }
  void operator()(const GaussianMixture& m) const {
    check_weights(m.weights, m.means.size());
    require(m.means.size() == m.variances.size(), "GaussianMixture: component count mismatch");
    for (double v : m.variances) require(std::isfinite(v) && v > 0.0, "GaussianMixture: variances must be positive");
  }
  void operator()(const LaplaceMixture& m) const {
    check_weights(m.weights, m.locations.size());
    require(m.locations.size() == m.scales.size(), "LaplaceMixture: component count mismatch");
    for (double b : m.scales) require(std::isfinite(b) && b > 0.0, "LaplaceMixture: scales must be positive");
  }
  void operator()(const GenLogisticMixture& m) const {
    check_weights(m.weights, m.shifts.size());
    require(m.shifts.size() == m.shapes.size(), "GenLogisticMixture: component count mismatch");
    for (double a : m.shapes) require(std::isfinite(a) && a > 0.0, "GenLogisticMixture: shapes must be positive");
  }
  void operator()(const Gumbel& g) const {
    require(std::isfinite(g.scale) && g.scale > 0.0, "Gumbel: scale must be positive");
  }
  void operator()(const Uniform& u) const {
    require(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo < u.hi, "Uniform: need lo < hi");
  }
  void operator()(const RationalSurrogate& s) const {
    require(!s.p.empty() && s.p.size() % 2 == 0, "RationalSurrogate: numerator needs degrees 1..2n");
    require(s.q.size() == s.p.size() + 1, "RationalSurrogate: denominator needs degrees 0..2n");
    require(s.theta != nullptr, "RationalSurrogate: reference density missing");
    for (double c : s.p) require(std::isfinite(c), "RationalSurrogate: non-finite coefficient");
    for (double c : s.q) require(std::isfinite(c), "RationalSurrogate: non-finite coefficient");
  }
  void operator()(const GridTabulated&) const {}  // normalized below
};

}  // namespace

Density::Density(Variant v) : v_(std::move(v)) {
  std::visit(Validator{}, v_);
  if (auto* t = std::get_if<GridTabulated>(&v_)) {
    auto& f = t->table;
    require(f.values.size() == static_cast<std::size_t>(f.grid.nodes), "GridTabulated: value count mismatch");
    for (double x : f.values) require(std::isfinite(x) && x >= 0.0, "GridTabulated: values must be nonnegative");
    const double h = f.grid.spacing();
    double trap = 0.0;
    for (double x : f.values) trap += x;
    trap = h * (trap - 0.5 * (f.values.front() + f.values.back()));
    require(std::isfinite(trap) && trap > 0.0, "GridTabulated: cannot normalize zero mass");
    for (double& x : f.values) x /= trap;
  }
}

double Density::eval(double x) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return std::exp(gaussian_log(x, d.mean, d.variance));
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i)
            acc += d.weights[i] * std::exp(gaussian_log(x, d.means[i], d.variances[i]));
          return acc;
        } else if constexpr (std::is_same_v<T, LaplaceMixture>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i)
            acc += d.weights[i] / (2.0 * d.scales[i]) * std::exp(-std::abs(x - d.locations[i]) / d.scales[i]);
          return acc;
        } else if constexpr (std::is_same_v<T, GenLogisticMixture>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i)
            acc += d.weights[i] * std::exp(gen_logistic_log(x - d.shifts[i], d.shapes[i]));
          return acc;
        } else if constexpr (std::is_same_v<T, Gumbel>) {
          const double t = x / d.scale;
          return std::exp(-std::log(d.scale) - t - std::exp(-t));
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return (x >= d.lo && x <= d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
        } else if constexpr (std::is_same_v<T, RationalSurrogate>) {
          std::vector<double> pf(d.p.size() + 1);
          pf[0] = 1.0;
          std::copy(d.p.begin(), d.p.end(), pf.begin() + 1);
          const double pv = polyval(pf, x);
          const double qv = polyval(d.q, x);
          if (qv <= 0.0) throw PositivityError("RationalSurrogate: Q(x) <= 0 at x = " + std::to_string(x));
          if (pv < 0.0) throw PositivityError("RationalSurrogate: P(x) < 0 at x = " + std::to_string(x));
          return pv * d.theta->eval(x) / qv;
        } else {
          static_assert(std::is_same_v<T, GridTabulated>);
          return d.table.interpolate(x);
        }
      },
      v_);
}

double Density::log_eval(double x) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return gaussian_log(x, d.mean, d.variance);
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          // log-sum-exp so far tails stay finite
          double best = -std::numeric_limits<double>::infinity();
          std::vector<double> terms(d.weights.size());
          for (std::size_t i = 0; i < d.weights.size(); ++i) {
            terms[i] = std::log(d.weights[i]) + gaussian_log(x, d.means[i], d.variances[i]);
            best = std::max(best, terms[i]);
          }
          if (!std::isfinite(best)) return best;
          double acc = 0.0;
          for (double t : terms) acc += std::exp(t - best);
          return best + std::log(acc);
        } else if constexpr (std::is_same_v<T, LaplaceMixture>) {
          double best = -std::numeric_limits<double>::infinity();
          std::vector<double> terms(d.weights.size());
          for (std::size_t i = 0; i < d.weights.size(); ++i) {
            terms[i] = std::log(d.weights[i] / (2.0 * d.scales[i])) - std::abs(x - d.locations[i]) / d.scales[i];
            best = std::max(best, terms[i]);
          }
          double acc = 0.0;
          for (double t : terms) acc += std::exp(t - best);
          return best + std::log(acc);
        } else if constexpr (std::is_same_v<T, GenLogisticMixture>) {
          double best = -std::numeric_limits<double>::infinity();
          std::vector<double> terms(d.weights.size());
          for (std::size_t i = 0; i < d.weights.size(); ++i) {
            terms[i] = std::log(d.weights[i]) + gen_logistic_log(x - d.shifts[i], d.shapes[i]);
            best = std::max(best, terms[i]);
          }
          if (!std::isfinite(best)) return best;
          double acc = 0.0;
          for (double t : terms) acc += std::exp(t - best);
          return best + std::log(acc);
        } else if constexpr (std::is_same_v<T, Gumbel>) {
          const double t = x / d.scale;
          return -std::log(d.scale) - t - std::exp(-t);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return (x >= d.lo && x <= d.hi) ? -std::log(d.hi - d.lo)
                                          : -std::numeric_limits<double>::infinity();
        } else if constexpr (std::is_same_v<T, RationalSurrogate>) {
          std::vector<double> pf(d.p.size() + 1);
          pf[0] = 1.0;
          std::copy(d.p.begin(), d.p.end(), pf.begin() + 1);
          const double pv = polyval(pf, x);
          const double qv = polyval(d.q, x);
          if (qv <= 0.0) throw PositivityError("RationalSurrogate: Q(x) <= 0 at x = " + std::to_string(x));
          if (pv <= 0.0) throw PositivityError("RationalSurrogate: P(x) <= 0 at x = " + std::to_string(x));
          return std::log(pv) + d.theta->log_eval(x) - std::log(qv);
        } else {
          static_assert(std::is_same_v<T, GridTabulated>);
          return std::log(std::max(d.table.interpolate(x), kLogFloor));
        }
      },
      v_);
}

std::vector<double> Density::sample(Rng& rng, int n) const {
  if (n < 0) throw std::invalid_argument("sample: negative count");
  std::vector<double> out(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          const double sd = std::sqrt(d.variance);
          for (double& x : out) x = rng.normal(d.mean, sd);
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          for (double& x : out) {
            const int i = pick_component(d.weights, rng);
            x = rng.normal(d.means[static_cast<std::size_t>(i)],
                           std::sqrt(d.variances[static_cast<std::size_t>(i)]));
          }
        } else if constexpr (std::is_same_v<T, LaplaceMixture>) {
          for (double& x : out) {
            const auto i = static_cast<std::size_t>(pick_component(d.weights, rng));
            const double u = draw_uniform_below_one(rng);
            x = (u < 0.5) ? d.locations[i] + d.scales[i] * std::log(2.0 * u)
                          : d.locations[i] - d.scales[i] * std::log(2.0 * (1.0 - u));
          }
        } else if constexpr (std::is_same_v<T, GenLogisticMixture>) {
          // inverse CDF of F(y) = (1 + e^{-y})^{-shape}
          for (double& x : out) {
            const auto i = static_cast<std::size_t>(pick_component(d.weights, rng));
            const double u = draw_uniform_below_one(rng);
            x = d.shifts[i] - std::log(std::pow(u, -1.0 / d.shapes[i]) - 1.0);
          }
        } else if constexpr (std::is_same_v<T, Gumbel>) {
          for (double& x : out) {
            const double u = draw_uniform_below_one(rng);
            x = -d.scale * std::log(-std::log(u));
          }
        } else if constexpr (std::is_same_v<T, Uniform>) {
          for (double& x : out) x = rng.uniform(d.lo, d.hi);
        } else {
          throw CapabilityError("sample: only analytic density variants can be sampled");
        }
      },
      v_);
  return out;
}

std::optional<double> Density::closed_form_power_moment(int k) const {
  if (k < 0) throw std::invalid_argument("closed_form_power_moment: negative order");
  return std::visit(
      [&](const auto& d) -> std::optional<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return gaussian_raw_moment(d.mean, d.variance, k);
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i)
            acc += d.weights[i] * gaussian_raw_moment(d.means[i], d.variances[i], k);
          return acc;
        } else if constexpr (std::is_same_v<T, LaplaceMixture>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < d.weights.size(); ++i)
            acc += d.weights[i] * laplace_raw_moment(d.locations[i], d.scales[i], k);
          return acc;
        } else if constexpr (std::is_same_v<T, Gumbel>) {
          return gumbel_raw_moment(d.scale, k);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          double acc = 0.0;  // (hi^{k+1} - lo^{k+1}) / ((k+1)(hi-lo)) without cancellation
          double lp = 1.0;
          for (int j = 0; j <= k; ++j) {
            acc += std::pow(d.hi, k - j) * lp;
            lp *= d.lo;
          }
          return acc / (k + 1);
        } else {
          return std::nullopt;
        }
      },
      v_);
}

GridFunction tabulate(const Density& d, const GridSpec& grid) {
  return tabulate(grid, [&](double x) { return d.eval(x); });
}

void validate_surrogate_positivity(const RationalSurrogate& s, const GridSpec& grid) {
  std::vector<double> pf(s.p.size() + 1);
  pf[0] = 1.0;
  std::copy(s.p.begin(), s.p.end(), pf.begin() + 1);
  for (int i = 0; i < grid.nodes; ++i) {
    const double x = grid.node(i);
    if (polyval(pf, x) <= 0.0)
      throw PositivityError("surrogate numerator not positive at x = " + std::to_string(x));
    if (polyval(s.q, x) <= 0.0)
      throw PositivityError("surrogate denominator not positive at x = " + std::to_string(x));
  }
}

}  // namespace momfilt
