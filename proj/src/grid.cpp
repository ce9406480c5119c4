#include "momfilt/grid.hpp"

#include <cmath>

namespace momfilt {

GridSpec::GridSpec(double lo, double hi, int nodes) : lo(lo), hi(hi), nodes(nodes) {
  if (!(lo < hi)) throw std::invalid_argument("GridSpec: lo must be < hi");
  if (nodes < 2) throw std::invalid_argument("GridSpec: need at least 2 nodes");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("GridSpec: bounds must be finite");
}

GridSpec GridSpec::extended(double fraction) const {
  const double h = spacing();
  const int extra = static_cast<int>(std::ceil(fraction * (nodes - 1)));
  return GridSpec(lo - extra * h, hi + extra * h, nodes + 2 * extra);
}

double GridFunction::interpolate(double x) const {
  if (x < grid.lo || x > grid.hi) return 0.0;
  const double t = (x - grid.lo) / grid.spacing();
  const int i = std::min(static_cast<int>(t), grid.nodes - 2);
  const double frac = t - i;
  const auto ui = static_cast<std::size_t>(i);
  return values[ui] * (1.0 - frac) + values[ui + 1] * frac;
}

std::vector<double> quadrature_weights(const GridSpec& grid) {
  const double h = grid.spacing();
  std::vector<double> w(static_cast<std::size_t>(grid.nodes));
  if (grid.nodes % 2 == 1) {
    // composite Simpson: h/3 * (1, 4, 2, 4, ..., 2, 4, 1)
    w.front() = h / 3.0;
    w.back() = h / 3.0;
    for (int i = 1; i < grid.nodes - 1; ++i)
      w[static_cast<std::size_t>(i)] = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
  } else {
    w.front() = h / 2.0;
    w.back() = h / 2.0;
    for (int i = 1; i < grid.nodes - 1; ++i) w[static_cast<std::size_t>(i)] = h;
  }
  return w;
}

double integrate(const GridFunction& f) {
  const std::vector<double> w = quadrature_weights(f.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f.values[i];
  return acc;
}

double integrate_moment(const GridFunction& f, int k) {
  if (k < 0) throw std::invalid_argument("integrate_moment: negative power");
  const std::vector<double> w = quadrature_weights(f.grid);
  double acc = 0.0;
  for (int i = 0; i < f.grid.nodes; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    acc += w[ui] * f.values[ui] * std::pow(f.grid.node(i), k);
  }
  return acc;
}

}  // namespace momfilt
