#pragma once

#include <memory>
#include <vector>

#include "momfilt/density.hpp"
#include "momfilt/grid.hpp"

namespace momfilt {

// Truncated moment data driving one surrogate fit: power moments sigma[k-1] =
// E[x^k] and reference-weighted log moments xi[k-1] for k = 1..order.
struct MomentVector {
  int order = 0;
  std::vector<double> sigma;
  std::vector<double> xi;
  std::shared_ptr<const Density> theta;
};

// E[x^k] for k = 1..order by quadrature
std::vector<double> power_moments(const Density& d, int order, const GridSpec& grid);
std::vector<double> power_moments(const GridFunction& f, int order);

// Raw moments including the k = 0 mass term, k = 0..order.
std::vector<double> raw_moments(const GridFunction& f, int order);

// Moments of x' = f * x + eta from posterior moments E[x^j] (j = 0..order) and
// noise moments E[eta^j] (j = 0..order), via the binomial expansion of
// E[(f x + eta)^k].  Returns k = 1..order.
std::vector<double> propagate_power_moments(const std::vector<double>& posterior_moments, double f,
                                            const std::vector<double>& eta_moments, int order);

// E[(shift + eta)^j] for j = 0..order; closed form when available, otherwise
// quadrature on `grid`.
std::vector<double> shifted_noise_moments(const Density& eta, double shift, int order,
                                          const GridSpec& grid);

// xi[k-1] = integral of x^k * theta(x) * log rho(x) dx for k = 1..order, with
// rho clamped to 1e-300 before the log.
std::vector<double> generalized_log_moments(const GridFunction& rho, const Density& theta, int order);
std::vector<double> generalized_log_moments(const Density& rho, const Density& theta, int order,
                                            const GridSpec& grid);

// True iff (1, sigma[0], ..., sigma[order-1]) is strictly realizable: every
// leading principal minor of the Hankel matrix of the affinely standardized
// sequence exceeds 1e-10.  Standardizing first makes the test scale-free, so
// tightly concentrated but healthy states are not rejected.
bool hankel_psd_check(const std::vector<double>& sigma, double tol = 1e-10);

// Moments of (x - c) / s given raw moments of x (index = power, m[0] = 1 slot
// included), and the inverse map.  Exact binomial transforms.
std::vector<double> standardize_raw_moments(const std::vector<double>& m, double c, double s);
std::vector<double> unstandardize_raw_moments(const std::vector<double>& m, double c, double s);

// mean and standard deviation, closed form when available
struct MeanStd {
  double mean = 0.0;
  double stddev = 1.0;
};
MeanStd density_mean_std(const Density& d, const GridSpec& grid);

}  // namespace momfilt
