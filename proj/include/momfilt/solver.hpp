#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "momfilt/density.hpp"
#include "momfilt/grid.hpp"

namespace momfilt {

// Coefficients of a fitted surrogate P theta / Q in the monomial basis.
struct SurrogateParams {
  std::vector<double> p;  // degrees 1..2n; P's constant term is fixed at 1
  std::vector<double> q;  // degrees 0..2n
  std::shared_ptr<const Density> theta;

  int order() const { return static_cast<int>(p.size()); }
  int free_parameter_count() const { return static_cast<int>(p.size() + q.size()); }
};

struct SolverOptions {
  int max_iterations = 200000;
  double grad_tol = 1e-6;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  // Targets outside the range the surrogate family can represent pin part of
  // the gradient at a nonzero floor while the iterate converges to an optimum
  // on the positivity boundary (P may touch zero there; Q cannot, its log
  // barrier is part of the objective).  When set, a stalled descent returns
  // that boundary fit with its residuals in the report instead of throwing.
  bool accept_boundary = false;
  std::optional<SurrogateParams> initial;
};

struct SolverReport {
  int iterations = 0;
  double grad_inf_norm = 0.0;          // at exit, in the monomial frame
  double objective = 0.0;
  // Moment residuals, fitted minus target, scaled by max(1, |target|) per
  // entry; the convergence test compares their infinity norm to grad_tol.
  std::vector<double> sigma_residual;  // k = 0..2n
  std::vector<double> xi_residual;     // k = 1..2n
};

// Convex dual objective
//   J(P,Q) = sum_k sigma_k q_k - sum_k xi_k p_k
//            + int P theta log(P theta / Q) - int P theta
// with sigma_0 = 1 included in the first sum.  Vanishing gradient is exactly
// moment matching: dJ/dq_k = sigma_k - int x^k P theta / Q and
// dJ/dp_k = int x^k theta log(P theta / Q) - xi_k.
double objective(const SurrogateParams& params, const std::vector<double>& sigma,
                 const std::vector<double>& xi, const GridSpec& grid);
std::pair<std::vector<double>, std::vector<double>> gradient(const SurrogateParams& params,
                                                             const std::vector<double>& sigma,
                                                             const std::vector<double>& xi,
                                                             const GridSpec& grid);

// Minimizes J for the given targets (sigma and xi for k = 1..order).  Descent
// runs in coordinates centered and scaled by theta's mean and standard
// deviation, which preconditions the otherwise badly scaled monomial problem;
// the stopping rule is the infinity norm of the target-scaled moment
// residuals in the original frame (see SolverReport).
SurrogateParams solve(const std::vector<double>& sigma, const std::vector<double>& xi,
                      const Density& theta, int order, const GridSpec& grid,
                      const SolverOptions& opts = {}, SolverReport* report = nullptr);

// Same with P frozen at 1: matches power moments only (denominator-only fit).
SurrogateParams solve_power_only(const std::vector<double>& sigma, const Density& theta, int order,
                                 const GridSpec& grid, const SolverOptions& opts = {},
                                 SolverReport* report = nullptr);

// Power and log moments (k = 1..order each) of the surrogate density itself,
// the same quantities whose residuals solve() drives to zero.
std::pair<std::vector<double>, std::vector<double>> moment_map(const SurrogateParams& params,
                                                               const GridSpec& grid);

// Validates positivity on the grid and wraps the fit as a Density.
Density to_density(const SurrogateParams& params, const GridSpec& grid);

}  // namespace momfilt
