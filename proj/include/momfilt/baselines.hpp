#pragma once

#include <vector>

#include "momfilt/density.hpp"
#include "momfilt/filter.hpp"
#include "momfilt/rng.hpp"

namespace momfilt {

struct KalmanState {
  double mean = 0.0;
  double variance = 1.0;
};

// Scalar predict-then-correct recursion for x' = f x + drift + N(0, q_var),
// y = h x + N(0, r_var).
KalmanState kalman_step(const KalmanState& state, double y, double f, double h, double drift,
                        double q_var, double r_var);

struct ParticleEnsemble {
  std::vector<double> positions;
  std::vector<double> weights;  // nonnegative, sum to 1
};

struct PfOptions {
  // resample every step by default; with the trigger on, resample only when
  // the effective sample size drops below ess_fraction * N
  bool ess_trigger = false;
  double ess_fraction = 0.5;
};

ParticleEnsemble make_uniform_ensemble(double lo, double hi, int count, Rng& rng);

double weighted_mean(const ParticleEnsemble& ens);
double effective_sample_size(const ParticleEnsemble& ens);

// Systematic resampling: one uniform offset, N evenly spaced pointers into the
// cumulative weights.  Resampled weights are uniform.
ParticleEnsemble systematic_resample(const ParticleEnsemble& ens, Rng& rng);

// One sampling-importance-resampling step.  Particles move through the state
// equation with fresh noise draws, are reweighted by likelihood(y - h x), and
// are resampled per the options.  The likelihood is passed separately from the
// model so a filter may assume a different observation density than the one
// that generated the data.
ParticleEnsemble pf_step(const ParticleEnsemble& ens, double y, const SystemModel& model,
                         const Density& likelihood, Rng& rng, const PfOptions& opts = {});

}  // namespace momfilt
