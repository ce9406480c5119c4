#include "momfilt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "momfilt/errors.hpp"

namespace momfilt {

KalmanState kalman_step(const KalmanState& state, double y, double f, double h, double drift,
                        double q_var, double r_var) {
  if (!(state.variance > 0.0)) throw std::invalid_argument("kalman_step: variance must be positive");
  if (q_var < 0.0 || !(r_var > 0.0))
    throw std::invalid_argument("kalman_step: noise variances out of range");
  const double mp = f * state.mean + drift;
  const double pp = f * f * state.variance + q_var;
  const double s = h * h * pp + r_var;
  const double k = pp * h / s;
  return KalmanState{mp + k * (y - h * mp), (1.0 - k * h) * pp};
}

ParticleEnsemble make_uniform_ensemble(double lo, double hi, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("make_uniform_ensemble: count must be positive");
  if (!(lo < hi)) throw std::invalid_argument("make_uniform_ensemble: empty interval");
  ParticleEnsemble ens;
  ens.positions.resize(static_cast<std::size_t>(count));
  for (double& x : ens.positions) x = rng.uniform(lo, hi);
  ens.weights.assign(static_cast<std::size_t>(count), 1.0 / count);
  return ens;
}

double weighted_mean(const ParticleEnsemble& ens) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ens.positions.size(); ++i) acc += ens.weights[i] * ens.positions[i];
  return acc;
}

double effective_sample_size(const ParticleEnsemble& ens) {
  double acc = 0.0;
  for (double w : ens.weights) acc += w * w;
  return 1.0 / acc;
}

ParticleEnsemble systematic_resample(const ParticleEnsemble& ens, Rng& rng) {
  const std::size_t n = ens.positions.size();
  ParticleEnsemble out;
  out.positions.resize(n);
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  const double step = 1.0 / static_cast<double>(n);
  double pointer = rng.uniform01() * step;  // in (0, 1/n]
  double cum = 0.0;
  std::size_t i = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = pointer + static_cast<double>(j) * step;
    while (cum + ens.weights[i] < target && i + 1 < n) {
      cum += ens.weights[i];
      ++i;
    }
    out.positions[j] = ens.positions[i];
  }
  return out;
}

ParticleEnsemble pf_step(const ParticleEnsemble& ens, double y, const SystemModel& model,
                         const Density& likelihood, Rng& rng, const PfOptions& opts) {
  const std::size_t n = ens.positions.size();
  ParticleEnsemble next;
  next.positions.resize(n);
  const std::vector<double> noise = model.eta.sample(rng, static_cast<int>(n));
  std::vector<double> logw(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.f * ens.positions[i] + model.drift + noise[i];
    next.positions[i] = x;
    const double lw = std::log(ens.weights[i]) + likelihood.log_eval(y - model.h * x);
    logw[i] = lw;
    top = std::max(top, lw);
  }
  if (!std::isfinite(top))
    throw DegenerateLikelihoodError("pf_step: every particle has zero likelihood");
  next.weights.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    next.weights[i] = std::exp(logw[i] - top);
    total += next.weights[i];
  }
  for (double& w : next.weights) w /= total;
  if (opts.ess_trigger &&
      effective_sample_size(next) > opts.ess_fraction * static_cast<double>(n))
    return next;
  return systematic_resample(next, rng);
}

}  // namespace momfilt
