#include "momfilt/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "momfilt/errors.hpp"
#include "momfilt/moments.hpp"
#include "momfilt/polynomial.hpp"

namespace momfilt {
namespace {

constexpr double kLogOfFloor = -690.77552789821370520539552739775181;  // log(1e-300)
constexpr double kInf = std::numeric_limits<double>::infinity();

// Integration tables in the working frame y = (x - center) / scale.  The
// y-nodes are the images of the x-grid nodes, so quadrature sums in either
// frame are the same numbers up to the substitution Jacobian.
struct Tables {
  int order = 0;
  double center = 0.0;
  double scale = 1.0;
  double kappa = 1.0;  // 1 + log(scale)
  std::vector<double> node;    // y values
  std::vector<double> w;       // quadrature weights in y
  std::vector<double> theta;   // scaled reference density values
  std::vector<double> ltheta;  // their logs, finite wherever theta > 0
  std::vector<double> tw;      // w * theta
  std::vector<double> xpow;    // node powers, rows k = 0..order
  std::vector<double> tmom;    // int y^k theta dy, k = 0..order

  std::size_t n() const { return node.size(); }
  const double* row(int k) const { return xpow.data() + static_cast<std::size_t>(k) * n(); }
};

Tables build_tables(const GridSpec& grid, int order, const Density& theta,
                    double center, double scale) {
  Tables t;
  t.order = order;
  t.center = center;
  t.scale = scale;
  t.kappa = 1.0 + std::log(scale);
  const auto n = static_cast<std::size_t>(grid.nodes);
  t.node.resize(n);
  t.theta.resize(n);
  t.ltheta.resize(n);
  const double lscale = std::log(scale);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(static_cast<int>(i));
    t.node[i] = (x - center) / scale;
    t.theta[i] = scale * theta.eval(x);
    t.ltheta[i] = lscale + theta.log_eval(x);
  }
  t.w = quadrature_weights(grid);
  for (double& wi : t.w) wi /= scale;
  t.tw.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.tw[i] = t.w[i] * t.theta[i];
  t.xpow.resize(static_cast<std::size_t>(order + 1) * n);
  for (std::size_t i = 0; i < n; ++i) t.xpow[i] = 1.0;
  for (int k = 1; k <= order; ++k) {
    const double* prev = t.xpow.data() + static_cast<std::size_t>(k - 1) * n;
    double* cur = t.xpow.data() + static_cast<std::size_t>(k) * n;
    for (std::size_t i = 0; i < n; ++i) cur[i] = prev[i] * t.node[i];
  }
  t.tmom.assign(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    const double* xp = t.row(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += t.tw[i] * xp[i];
    t.tmom[static_cast<std::size_t>(k)] = acc;
  }
  return t;
}

// Positivity is required exactly on the quadrature nodes, matching the
// objective's own barrier: as P or Q approaches zero at a weighted node the
// log term diverges and the gradient restores the iterate.  Checking any
// wider set would add faces that carry no quadrature weight and hence no
// restoring force, where descent jams.  The surrogate lives on a compact
// window, so the sign of the leading coefficients is free.  Returns the
// minima of P and Q over the nodes so the caller can keep iterates interior.
bool trial_feasible(const Tables& t, const std::vector<double>& p, const std::vector<double>& q,
                    double* min_p = nullptr, double* min_q = nullptr) {
  for (double c : p)
    if (!std::isfinite(c)) return false;
  for (double c : q)
    if (!std::isfinite(c)) return false;
  double mp = kInf, mq = kInf;
  for (double y : t.node) {
    mp = std::min(mp, polyval(p, y));
    mq = std::min(mq, polyval(q, y));
    if (mp <= 0.0 || mq <= 0.0) return false;
  }
  if (min_p) *min_p = mp;
  if (min_q) *min_q = mq;
  return true;
}

// One sweep: objective, both gradient blocks, the fitted moment integrals,
// and the Hessian diagonals used as a Jacobi preconditioner.  a_sigma / a_xi
// are the target linear coefficients in the working frame.
struct Sweep {
  double obj = kInf;
  std::vector<double> gp, gq;        // dJ/dp_k, dJ/dq_k, k = 0..order
  std::vector<double> hp, hq;        // d2J/dp_k2 = int y^2k theta/P, d2J/dq_k2 = int y^2k P theta/Q^2
  std::vector<double> fit_power;     // int y^k (P theta / Q) dy
  std::vector<double> fit_logmom;    // int y^k theta log(rho in x-frame) dy, clamped
};

void run_sweep(const Tables& t, const std::vector<double>& p, const std::vector<double>& q,
               const std::vector<double>& a_sigma, const std::vector<double>& a_xi, Sweep& out) {
  const std::size_t n = t.n();
  const std::size_t m = static_cast<std::size_t>(t.order) + 1;
  out.gp.assign(m, 0.0);
  out.gq.assign(m, 0.0);
  out.hp.assign(m, 0.0);
  out.hq.assign(m, 0.0);
  out.fit_power.assign(m, 0.0);
  out.fit_logmom.assign(m, 0.0);
  const double lclamp = kLogOfFloor + std::log(t.scale);
  double jint = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.tw[i] == 0.0) continue;
    const double y = t.node[i];
    const double pv = polyval(p, y);
    const double qv = polyval(q, y);
    if (pv <= 0.0 || qv <= 0.0) {
      out.obj = kInf;
      return;
    }
    const double lr = std::log(pv) + t.ltheta[i] - std::log(qv);
    const double lr_clamped = std::max(lr, lclamp);
    const double r = pv * t.theta[i] / qv;
    jint += t.tw[i] * pv * (lr - t.kappa);
    const double wl = t.tw[i] * lr_clamped;
    const double wr = t.w[i] * r;
    const double cp = t.tw[i] / pv;
    const double cq = wr / qv;
    const double* x0 = t.xpow.data();
    for (std::size_t k = 0; k < m; ++k) {
      const double xp = x0[k * n + i];
      const double xp2 = xp * xp;
      out.fit_logmom[k] += wl * xp;
      out.fit_power[k] += wr * xp;
      out.hp[k] += cp * xp2;
      out.hq[k] += cq * xp2;
    }
  }
  // A collapsing denominator sends the fitted power moments to overflow long
  // before the objective misbehaves; treat such sweeps as infeasible so the
  // line search retreats while every quantity is still representable.
  for (std::size_t k = 0; k < m; ++k) {
    if (!(std::abs(out.fit_power[k]) < 1e100) || !(std::abs(out.fit_logmom[k]) < 1e100)) {
      out.obj = kInf;
      return;
    }
  }
  double lin = 0.0;
  for (std::size_t k = 0; k < m; ++k) lin += a_sigma[k] * q[k] - a_xi[k] * p[k];
  out.obj = lin + jint;
  if (!std::isfinite(out.obj)) {
    out.obj = kInf;
    return;
  }
  for (std::size_t k = 0; k < m; ++k) {
    out.gp[k] = -a_xi[k] + out.fit_logmom[k] + (1.0 - t.kappa) * t.tmom[k];
    out.gq[k] = a_sigma[k] - out.fit_power[k];
  }
}

struct Frame {
  Tables tables;
  std::vector<double> a_sigma, a_xi;     // working-frame target coefficients
  std::vector<double> target_sigma_hat;  // x-frame (1, sigma_1..sigma_2n)
  std::vector<double> target_xi_hat;     // x-frame (0, xi_1..xi_2n)
  std::vector<double> constraint;        // powers of y0 = -center/scale; P(x=0) = 1
  double constraint_norm2 = 1.0;
};

Frame build_frame(const std::vector<double>& sigma, const std::vector<double>& xi,
                  const Density& theta, int order, const GridSpec& grid) {
  Frame f;
  const MeanStd ms = density_mean_std(theta, grid);
  f.tables = build_tables(grid, order, theta, ms.mean, ms.stddev);
  const auto m = static_cast<std::size_t>(order) + 1;
  f.target_sigma_hat.assign(m, 0.0);
  f.target_sigma_hat[0] = 1.0;
  std::copy(sigma.begin(), sigma.end(), f.target_sigma_hat.begin() + 1);
  f.target_xi_hat.assign(m, 0.0);
  if (!xi.empty()) std::copy(xi.begin(), xi.end(), f.target_xi_hat.begin() + 1);
  f.a_sigma = standardize_raw_moments(f.target_sigma_hat, ms.mean, ms.stddev);
  f.a_xi = standardize_raw_moments(f.target_xi_hat, ms.mean, ms.stddev);
  f.constraint.resize(m);
  const double y0 = -ms.mean / ms.stddev;
  double acc = 1.0;
  f.constraint_norm2 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    f.constraint[k] = acc;
    f.constraint_norm2 += acc * acc;
    acc *= y0;
  }
  return f;
}

// Residuals of the fitted moments against the targets, in the monomial frame,
// each scaled by max(1, |target|) so a single tolerance is meaningful across
// moment orders whose magnitudes span several decades. dJ/dq in that frame is
// (target - fitted) power moments and dJ/dp is (fitted - target) log moments,
// so the unscaled infinity norm would be the gradient infinity norm of the
// original objective; the scaled one is its target-relative counterpart.
struct Residuals {
  std::vector<double> sigma;  // k = 0..order
  std::vector<double> xi;     // k = 1..order
  double inf_norm = kInf;
};

Residuals monomial_residuals(const Frame& f, const Sweep& sw, bool with_xi) {
  const Tables& t = f.tables;
  Residuals r;
  const std::vector<double> fitted_sigma = unstandardize_raw_moments(sw.fit_power, t.center, t.scale);
  const auto m = sw.fit_power.size();
  std::vector<double> ylog(m);
  const double lscale = std::log(t.scale);
  for (std::size_t k = 0; k < m; ++k) ylog[k] = sw.fit_logmom[k] - lscale * t.tmom[k];
  const std::vector<double> fitted_xi = unstandardize_raw_moments(ylog, t.center, t.scale);
  r.sigma.resize(m);
  r.inf_norm = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double den = std::max(1.0, std::abs(f.target_sigma_hat[k]));
    r.sigma[k] = (fitted_sigma[k] - f.target_sigma_hat[k]) / den;
    r.inf_norm = std::max(r.inf_norm, std::abs(r.sigma[k]));
  }
  r.xi.assign(m - 1, 0.0);
  if (with_xi) {
    for (std::size_t k = 1; k < m; ++k) {
      const double den = std::max(1.0, std::abs(f.target_xi_hat[k]));
      r.xi[k - 1] = (fitted_xi[k] - f.target_xi_hat[k]) / den;
      r.inf_norm = std::max(r.inf_norm, std::abs(r.xi[k - 1]));
    }
  }
  return r;
}

void project_out_constraint(const Frame& f, std::vector<double>& gp) {
  double dot = 0.0;
  for (std::size_t k = 0; k < gp.size(); ++k) dot += gp[k] * f.constraint[k];
  const double coeff = dot / f.constraint_norm2;
  for (std::size_t k = 0; k < gp.size(); ++k) gp[k] -= coeff * f.constraint[k];
}

SurrogateParams back_transform(const Frame& f, const std::vector<double>& p,
                               const std::vector<double>& q, const Density& theta) {
  const Tables& t = f.tables;
  // P(x) = Ptilde((x - c) / s)
  std::vector<double> px = poly_substitute_affine(p, -t.center / t.scale, 1.0 / t.scale);
  std::vector<double> qx = poly_substitute_affine(q, -t.center / t.scale, 1.0 / t.scale);
  const double p0 = px[0];
  if (!(p0 > 0.0)) throw PositivityError("solver: numerator lost positivity at x = 0");
  for (double& c : px) c /= p0;
  for (double& c : qx) c /= p0;
  SurrogateParams out;
  out.p.assign(px.begin() + 1, px.end());
  out.q = std::move(qx);
  out.theta = std::make_shared<Density>(theta);
  return out;
}

void validate_targets(const std::vector<double>& sigma, const std::vector<double>& xi, int order,
                      bool with_xi) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("solve: order must be even and >= 2");
  if (static_cast<int>(sigma.size()) != order) throw std::invalid_argument("solve: sigma size must equal order");
  if (with_xi && static_cast<int>(xi.size()) != order)
    throw std::invalid_argument("solve: xi size must equal order");
  for (double v : sigma)
    if (!std::isfinite(v)) throw FeasibilityError("solve: non-finite power moment");
  for (double v : xi)
    if (!std::isfinite(v)) throw FeasibilityError("solve: non-finite log moment");
  if (!hankel_psd_check(sigma))
    throw FeasibilityError("solve: power moments fail the Hankel positivity test");
}

SurrogateParams solve_impl(const std::vector<double>& sigma, const std::vector<double>& xi,
                           bool fit_p, const Density& theta, int order, const GridSpec& grid,
                           const SolverOptions& opts, SolverReport* report) {
  validate_targets(sigma, xi, order, fit_p);
  Frame f = build_frame(sigma, xi, theta, order, grid);
  const Tables& t = f.tables;
  const auto m = static_cast<std::size_t>(order) + 1;

  std::vector<double> p(m, 0.0), q(m, 0.0);
  p[0] = 1.0;
  q[0] = 1.0;
  if (opts.initial) {
    const SurrogateParams& init = *opts.initial;
    if (init.order() != order) throw std::invalid_argument("solve: initial point has wrong order");
    std::vector<double> px(m);
    px[0] = 1.0;
    std::copy(init.p.begin(), init.p.end(), px.begin() + 1);
    p = poly_substitute_affine(px, t.center, t.scale);
    q = poly_substitute_affine(init.q, t.center, t.scale);
    if (!trial_feasible(t, p, q))
      throw PositivityError("solve: initial point violates positivity on the check grid");
  }

  Sweep sw;
  run_sweep(t, p, q, f.a_sigma, f.a_xi, sw);
  if (!std::isfinite(sw.obj)) throw PositivityError("solve: initial point infeasible");
  double min_p = 0.0, min_q = 0.0;
  if (!trial_feasible(t, p, q, &min_p, &min_q))
    throw PositivityError("solve: initial point violates positivity on the check grid");

  std::vector<double> gp = sw.gp, gq = sw.gq;
  std::vector<double> dp(m, 0.0), dq(m, 0.0);
  std::vector<double> trial_p(m), trial_q(m);

  // Quasi-Newton model of the inverse Hessian over the flattened (p, q)
  // coordinates, maintained by BFGS rank-two updates and re-seeded from the
  // Hessian diagonal.  The diagonal alone misses the near-rank-one curvature
  // spike a pinched node contributes, which is exactly what the secant pairs
  // recover; at 4n+2 coordinates the dense update costs nothing next to a
  // grid sweep.  All vectors fed to the model live in the constraint
  // subspace (p-block projected), so the model maps it to itself.
  const std::size_t nz = 2 * m;
  std::vector<double> hinv(nz * nz, 0.0);
  std::vector<double> g_flat(nz, 0.0), g_prev(nz, 0.0), s_vec(nz, 0.0), y_vec(nz, 0.0),
      hy(nz, 0.0);
  auto reseed_model = [&]() {
    double hmax = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (fit_p) hmax = std::max(hmax, sw.hp[k]);
      hmax = std::max(hmax, sw.hq[k]);
    }
    const double hfloor = std::max(1e-6 * hmax, 1e-300);
    std::fill(hinv.begin(), hinv.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      if (fit_p) hinv[k * nz + k] = 1.0 / std::max(sw.hp[k], hfloor);
      hinv[(m + k) * nz + (m + k)] = 1.0 / std::max(sw.hq[k], hfloor);
    }
  };

  int iter = 0;
  int model_iter = -1000;  // forces a model seed on the first iteration
  bool have_prev = false;
  Residuals res;

  for (iter = 0; iter < opts.max_iterations; ++iter) {
    gp = sw.gp;
    gq = sw.gq;
    if (fit_p) {
      project_out_constraint(f, gp);
    } else {
      std::fill(gp.begin(), gp.end(), 0.0);
    }
    res = monomial_residuals(f, sw, fit_p);
    if (res.inf_norm <= opts.grad_tol) break;

    double gnorm2 = 0.0;
    for (double g : gp) gnorm2 += g * g;
    for (double g : gq) gnorm2 += g * g;
    if (gnorm2 <= 1e-30) break;  // working-frame gradient at numerical floor

    std::copy(gp.begin(), gp.end(), g_flat.begin());
    std::copy(gq.begin(), gq.end(), g_flat.begin() + static_cast<std::ptrdiff_t>(m));

    if (iter - model_iter >= 500) {
      reseed_model();
      model_iter = iter;
      have_prev = false;
    } else if (have_prev) {
      // BFGS update from the last accepted step; convexity makes the
      // curvature product positive, so the safeguard only filters rounding.
      double sy = 0.0, ss = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < nz; ++i) {
        y_vec[i] = g_flat[i] - g_prev[i];
        sy += s_vec[i] * y_vec[i];
        ss += s_vec[i] * s_vec[i];
        yy += y_vec[i] * y_vec[i];
      }
      if (sy > 1e-12 * std::sqrt(ss * yy)) {
        const double rho = 1.0 / sy;
        double c = 0.0;
        for (std::size_t i = 0; i < nz; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < nz; ++j) acc += hinv[i * nz + j] * y_vec[j];
          hy[i] = acc;
          c += y_vec[i] * acc;
        }
        const double beta = rho * rho * c + rho;
        for (std::size_t i = 0; i < nz; ++i)
          for (std::size_t j = 0; j < nz; ++j)
            hinv[i * nz + j] +=
                beta * s_vec[i] * s_vec[j] - rho * (s_vec[i] * hy[j] + hy[i] * s_vec[j]);
      }
    }

    for (std::size_t k = 0; k < m; ++k) {
      double ap = 0.0, aq = 0.0;
      for (std::size_t j = 0; j < nz; ++j) {
        ap += hinv[k * nz + j] * g_flat[j];
        aq += hinv[(m + k) * nz + j] * g_flat[j];
      }
      dp[k] = ap;
      dq[k] = aq;
    }
    if (fit_p) project_out_constraint(f, dp);

    double slope = 0.0;
    for (std::size_t k = 0; k < m; ++k) slope -= gp[k] * dp[k] + gq[k] * dq[k];
    if (!(slope < 0.0)) {
      // The model degenerated numerically; fall back to the fresh diagonal.
      reseed_model();
      model_iter = iter;
      have_prev = false;
      for (std::size_t k = 0; k < m; ++k) {
        dp[k] = fit_p ? gp[k] * hinv[k * nz + k] : 0.0;
        dq[k] = gq[k] * hinv[(m + k) * nz + (m + k)];
      }
      if (fit_p) project_out_constraint(f, dp);
      slope = 0.0;
      for (std::size_t k = 0; k < m; ++k) slope -= gp[k] * dp[k] + gq[k] * dq[k];
      if (!(slope < 0.0)) break;
    }

    const double ref = sw.obj;
    // Rounding slack keeps the line search alive once true decreases shrink
    // below the representable resolution of the objective.
    const double slack = 1e-14 * (1.0 + std::abs(ref));
    double alpha = 1.0;  // the quasi-Newton step is already scaled
    bool accepted = false;
    Sweep sw_trial;
    double trial_min_p = 0.0, trial_min_q = 0.0;
    while (alpha >= 1e-20) {
      for (std::size_t k = 0; k < m; ++k) {
        trial_p[k] = p[k] - alpha * dp[k];
        trial_q[k] = q[k] - alpha * dq[k];
      }
      // Fraction-to-the-boundary: the positivity margin may shrink by at most
      // half per step, so iterates approach the wall geometrically instead of
      // overshooting into the high-curvature shell where steps collapse.
      if (trial_feasible(t, trial_p, trial_q, &trial_min_p, &trial_min_q) &&
          trial_min_p >= 0.5 * min_p && trial_min_q >= 0.5 * min_q) {
        run_sweep(t, trial_p, trial_q, f.a_sigma, f.a_xi, sw_trial);
        if (sw_trial.obj <= ref + opts.armijo_slope * alpha * slope + slack) {
          accepted = true;
          break;
        }
      }
      alpha *= opts.backtrack;
    }
    if (!accepted) break;  // line search exhausted; residuals reported below

    for (std::size_t k = 0; k < m; ++k) {
      s_vec[k] = trial_p[k] - p[k];
      s_vec[m + k] = trial_q[k] - q[k];
    }
    g_prev = g_flat;
    have_prev = true;
    p.swap(trial_p);
    q.swap(trial_q);
    sw = sw_trial;
    min_p = trial_min_p;
    min_q = trial_min_q;
  }

  res = monomial_residuals(f, sw, fit_p);  // residuals at the final iterate
  if (report) {
    report->iterations = iter;
    report->grad_inf_norm = res.inf_norm;
    report->objective = sw.obj;
    report->sigma_residual = res.sigma;
    report->xi_residual = res.xi;
  }
  if (res.inf_norm > opts.grad_tol) {
    std::ostringstream msg;
    msg << "solve: no convergence after " << iter << " iterations, residual inf-norm "
        << res.inf_norm << " > " << opts.grad_tol;
    throw ConvergenceError(msg.str(), iter, res.inf_norm);
  }
  return back_transform(f, p, q, theta);
}

}  // namespace

double objective(const SurrogateParams& params, const std::vector<double>& sigma,
                 const std::vector<double>& xi, const GridSpec& grid) {
  const int order = params.order();
  validate_targets(sigma, xi, order, true);
  if (!params.theta) throw std::invalid_argument("objective: params.theta missing");
  Tables t = build_tables(grid, order, *params.theta, 0.0, 1.0);
  const auto m = static_cast<std::size_t>(order) + 1;
  std::vector<double> a_sigma(m), a_xi(m, 0.0), p(m), q = params.q;
  a_sigma[0] = 1.0;
  std::copy(sigma.begin(), sigma.end(), a_sigma.begin() + 1);
  std::copy(xi.begin(), xi.end(), a_xi.begin() + 1);
  p[0] = 1.0;
  std::copy(params.p.begin(), params.p.end(), p.begin() + 1);
  Sweep sw;
  run_sweep(t, p, q, a_sigma, a_xi, sw);
  if (!std::isfinite(sw.obj))
    throw PositivityError("objective: P or Q not positive over the grid");
  return sw.obj;
}

std::pair<std::vector<double>, std::vector<double>> gradient(const SurrogateParams& params,
                                                             const std::vector<double>& sigma,
                                                             const std::vector<double>& xi,
                                                             const GridSpec& grid) {
  const int order = params.order();
  validate_targets(sigma, xi, order, true);
  if (!params.theta) throw std::invalid_argument("gradient: params.theta missing");
  Tables t = build_tables(grid, order, *params.theta, 0.0, 1.0);
  const auto m = static_cast<std::size_t>(order) + 1;
  std::vector<double> a_sigma(m), a_xi(m, 0.0), p(m), q = params.q;
  a_sigma[0] = 1.0;
  std::copy(sigma.begin(), sigma.end(), a_sigma.begin() + 1);
  std::copy(xi.begin(), xi.end(), a_xi.begin() + 1);
  p[0] = 1.0;
  std::copy(params.p.begin(), params.p.end(), p.begin() + 1);
  Sweep sw;
  run_sweep(t, p, q, a_sigma, a_xi, sw);
  if (!std::isfinite(sw.obj))
    throw PositivityError("gradient: P or Q not positive over the grid");
  std::vector<double> gp(sw.gp.begin() + 1, sw.gp.end());  // p0 is not a free parameter
  return {gp, sw.gq};
}

SurrogateParams solve(const std::vector<double>& sigma, const std::vector<double>& xi,
                      const Density& theta, int order, const GridSpec& grid,
                      const SolverOptions& opts, SolverReport* report) {
  return solve_impl(sigma, xi, true, theta, order, grid, opts, report);
}

SurrogateParams solve_power_only(const std::vector<double>& sigma, const Density& theta, int order,
                                 const GridSpec& grid, const SolverOptions& opts,
                                 SolverReport* report) {
  return solve_impl(sigma, {}, false, theta, order, grid, opts, report);
}

std::pair<std::vector<double>, std::vector<double>> moment_map(const SurrogateParams& params,
                                                               const GridSpec& grid) {
  const int order = params.order();
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("moment_map: bad order");
  if (!params.theta) throw std::invalid_argument("moment_map: params.theta missing");
  Tables t = build_tables(grid, order, *params.theta, 0.0, 1.0);
  const auto m = static_cast<std::size_t>(order) + 1;
  std::vector<double> p(m), q = params.q;
  p[0] = 1.0;
  std::copy(params.p.begin(), params.p.end(), p.begin() + 1);
  Sweep sw;
  run_sweep(t, p, q, std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), sw);
  if (!std::isfinite(sw.obj)) throw PositivityError("moment_map: P or Q not positive over the grid");
  std::vector<double> sig(sw.fit_power.begin() + 1, sw.fit_power.end());
  std::vector<double> lxi(sw.fit_logmom.begin() + 1, sw.fit_logmom.end());
  return {sig, lxi};
}

Density to_density(const SurrogateParams& params, const GridSpec& grid) {
  if (!params.theta) throw std::invalid_argument("to_density: params.theta missing");
  RationalSurrogate s{params.p, params.q, params.theta};
  validate_surrogate_positivity(s, grid);
  return Density(std::move(s));
}

}  // namespace momfilt
