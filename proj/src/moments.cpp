#include "momfilt/moments.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "momfilt/errors.hpp"
#include "momfilt/polynomial.hpp"

namespace momfilt {
namespace {

constexpr double kLogFloor = 1e-300;

void check_order(int order) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("moment order must be even and >= 2");
}

}  // namespace

std::vector<double> raw_moments(const GridFunction& f, int order) {
  const std::vector<double> w = quadrature_weights(f.grid);
  std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
  for (int i = 0; i < f.grid.nodes; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double base = w[ui] * f.values[ui];
    double xp = 1.0;
    const double x = f.grid.node(i);
    for (int k = 0; k <= order; ++k) {
      out[static_cast<std::size_t>(k)] += base * xp;
      xp *= x;
    }
  }
  return out;
}

std::vector<double> power_moments(const GridFunction& f, int order) {
  check_order(order);
  std::vector<double> all = raw_moments(f, order);
  return {all.begin() + 1, all.end()};
}

std::vector<double> power_moments(const Density& d, int order, const GridSpec& grid) {
  return power_moments(tabulate(d, grid), order);
}

std::vector<double> propagate_power_moments(const std::vector<double>& posterior_moments, double f,
                                            const std::vector<double>& eta_moments, int order) {
  check_order(order);
  const auto n = static_cast<std::size_t>(order);
  if (posterior_moments.size() < n + 1 || eta_moments.size() < n + 1)
    throw std::invalid_argument("propagate_power_moments: need moments 0..order");
  for (std::size_t j = 0; j <= n; ++j)
    if (!std::isfinite(posterior_moments[j]) || !std::isfinite(eta_moments[j]))
      throw std::invalid_argument("propagate_power_moments: non-finite input moment");
  std::vector<double> out(n);
  for (std::size_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    double fpow = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      acc += binomial(static_cast<int>(k), static_cast<int>(j)) * fpow * posterior_moments[j] *
             eta_moments[k - j];
      fpow *= f;
    }
    out[k - 1] = acc;
  }
  return out;
}

std::vector<double> shifted_noise_moments(const Density& eta, double shift, int order,
                                          const GridSpec& grid) {
  if (order < 0) throw std::invalid_argument("shifted_noise_moments: negative order");
  const auto n = static_cast<std::size_t>(order);
  std::vector<double> base(n + 1);
  bool closed = true;
  for (std::size_t j = 0; j <= n; ++j) {
    const auto m = eta.closed_form_power_moment(static_cast<int>(j));
    if (!m) {
      closed = false;
      break;
    }
    base[j] = *m;
  }
  if (!closed) {
    base = raw_moments(tabulate(eta, grid), order);
    // quadrature mass should be ~1; renormalize so moment ratios stay exact
    if (base[0] <= 0.0) throw std::invalid_argument("shifted_noise_moments: noise density has no mass on grid");
    for (std::size_t j = 1; j <= n; ++j) base[j] /= base[0];
    base[0] = 1.0;
  }
  if (shift == 0.0) return base;
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    double acc = 0.0;
    double spow = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      // sum C(k,j) shift^(k-j) E[eta^j]; build shift powers from j = k down
      acc += binomial(static_cast<int>(k), static_cast<int>(k - j)) * base[k - j] * spow;
      spow *= shift;
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> generalized_log_moments(const GridFunction& rho, const Density& theta, int order) {
  check_order(order);
  const std::vector<double> w = quadrature_weights(rho.grid);
  std::vector<double> out(static_cast<std::size_t>(order), 0.0);
  for (int i = 0; i < rho.grid.nodes; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double x = rho.grid.node(i);
    const double tv = theta.eval(x);
    if (tv == 0.0) continue;
    const double lr = std::log(std::max(rho.values[ui], kLogFloor));
    double xp = x;
    const double base = w[ui] * tv * lr;
    for (int k = 1; k <= order; ++k) {
      out[static_cast<std::size_t>(k - 1)] += base * xp;
      xp *= x;
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) throw FeasibilityError("generalized_log_moments: non-finite result");
  return out;
}

std::vector<double> generalized_log_moments(const Density& rho, const Density& theta, int order,
                                            const GridSpec& grid) {
  check_order(order);
  const std::vector<double> w = quadrature_weights(grid);
  constexpr double kLogOfFloor = -690.77552789821370520539552739775181;
  std::vector<double> out(static_cast<std::size_t>(order), 0.0);
  for (int i = 0; i < grid.nodes; ++i) {
    const double x = grid.node(i);
    const double tv = theta.eval(x);
    if (tv == 0.0) continue;
    const double lr = std::max(rho.log_eval(x), kLogOfFloor);
    double xp = x;
    const double base = w[static_cast<std::size_t>(i)] * tv * lr;
    for (int k = 1; k <= order; ++k) {
      out[static_cast<std::size_t>(k - 1)] += base * xp;
      xp *= x;
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) throw FeasibilityError("generalized_log_moments: non-finite result");
  return out;
}

std::vector<double> standardize_raw_moments(const std::vector<double>& m, double c, double s) {
  const std::size_t n = m.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    double cpow = 1.0;  // (-c)^(k-j), j from k down to 0
    for (std::size_t j = k + 1; j-- > 0;) {
      acc += binomial(static_cast<int>(k), static_cast<int>(j)) * cpow * m[j];
      cpow *= -c;
    }
    out[k] = acc / std::pow(s, static_cast<double>(k));
  }
  return out;
}

std::vector<double> unstandardize_raw_moments(const std::vector<double>& m, double c, double s) {
  const std::size_t n = m.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    double cpow = 1.0;
    double spow = std::pow(s, static_cast<double>(k));
    for (std::size_t j = k + 1; j-- > 0;) {
      acc += binomial(static_cast<int>(k), static_cast<int>(j)) * cpow * spow * m[j];
      cpow *= c;
      spow /= s;
    }
    out[k] = acc;
  }
  return out;
}

bool hankel_psd_check(const std::vector<double>& sigma, double tol) {
  const int order = static_cast<int>(sigma.size());
  check_order(order);
  for (double v : sigma)
    if (!std::isfinite(v)) throw FeasibilityError("hankel_psd_check: non-finite moment");
  const double var = sigma[1] - sigma[0] * sigma[0];
  if (!(var > tol * std::max(1.0, std::abs(sigma[1])))) return false;

  std::vector<double> m(sigma.size() + 1);
  m[0] = 1.0;
  std::copy(sigma.begin(), sigma.end(), m.begin() + 1);
  const std::vector<double> std_m = standardize_raw_moments(m, sigma[0], std::sqrt(var));

  const int dim = order / 2 + 1;
  Eigen::MatrixXd h(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) h(i, j) = std_m[static_cast<std::size_t>(i + j)];
  for (int lead = 1; lead <= dim; ++lead) {
    if (!(h.topLeftCorner(lead, lead).determinant() > tol)) return false;
  }
  return true;
}

MeanStd density_mean_std(const Density& d, const GridSpec& grid) {
  double m1 = 0.0, m2 = 0.0;
  const auto c1 = d.closed_form_power_moment(1);
  const auto c2 = d.closed_form_power_moment(2);
  if (c1 && c2) {
    m1 = *c1;
    m2 = *c2;
  } else {
    const std::vector<double> m = raw_moments(tabulate(d, grid), 2);
    if (m[0] <= 0.0) throw std::invalid_argument("density_mean_std: no mass on grid");
    m1 = m[1] / m[0];
    m2 = m[2] / m[0];
  }
  const double var = m2 - m1 * m1;
  if (!(var > 0.0) || !std::isfinite(var)) throw std::invalid_argument("density_mean_std: nonpositive variance");
  return {m1, std::sqrt(var)};
}

}  // namespace momfilt
