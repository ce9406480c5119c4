#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace momfilt {

// Uniform grid on [lo, hi] with `nodes` points, node(0) == lo, node(nodes-1) == hi.
struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  int nodes = 2;

  GridSpec() = default;
  GridSpec(double lo, double hi, int nodes);

  double spacing() const { return (hi - lo) / (nodes - 1); }
  double node(int i) const { return lo + spacing() * i; }

  // same spacing, widened by `fraction` of the span on each side
  GridSpec extended(double fraction) const;

  bool operator==(const GridSpec&) const = default;
};

// Function values tabulated on a grid, values[i] == f(grid.node(i)).
struct GridFunction {
  GridSpec grid;
  std::vector<double> values;

  // piecewise-linear inside [lo, hi], zero outside
  double interpolate(double x) const;
};

// Composite Simpson weights when the node count is odd, trapezoid otherwise.
std::vector<double> quadrature_weights(const GridSpec& grid);

double integrate(const GridFunction& f);

// integral of x^k * f(x)
double integrate_moment(const GridFunction& f, int k);

template <class F>
GridFunction tabulate(const GridSpec& grid, F&& f) {
  GridFunction out{grid, std::vector<double>(static_cast<std::size_t>(grid.nodes))};
  for (int i = 0; i < grid.nodes; ++i) out.values[static_cast<std::size_t>(i)] = f(grid.node(i));
  return out;
}

// c(x_j) = integral of a(e) * b(x_j - e) de, quadrature over a's grid.
// Direct O(n^2) evaluation; b must be evaluable at arbitrary points.
template <class F>
GridFunction convolve_on_grid(const GridFunction& a, F&& b, const GridSpec& out_grid) {
  const std::vector<double> w = quadrature_weights(a.grid);
  const int na = a.grid.nodes;
  std::vector<double> wa(static_cast<std::size_t>(na));
  for (int i = 0; i < na; ++i)
    wa[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] * a.values[static_cast<std::size_t>(i)];
  GridFunction out{out_grid, std::vector<double>(static_cast<std::size_t>(out_grid.nodes))};
  for (int j = 0; j < out_grid.nodes; ++j) {
    const double x = out_grid.node(j);
    double acc = 0.0;
    for (int i = 0; i < na; ++i) {
      const double c = wa[static_cast<std::size_t>(i)];
      if (c != 0.0) acc += c * b(x - a.grid.node(i));
    }
    out.values[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

}  // namespace momfilt
