#pragma once

#include <cstddef>
#include <vector>

namespace momfilt {

// coeffs[k] multiplies x^k
inline double polyval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

// Coefficients of P(c + s*y) as a polynomial in y, given coefficients of P(x).
// Exact degree-preserving affine substitution.
inline std::vector<double> poly_substitute_affine(const std::vector<double>& p, double c, double s) {
  const std::size_t n = p.size();
  std::vector<double> out(n, 0.0);
  // x^j = (c + s y)^j = sum_k C(j,k) c^(j-k) s^k y^k
  for (std::size_t j = 0; j < n; ++j) {
    double cf = p[j];
    if (cf == 0.0) continue;
    double cpow = 1.0;  // c^(j-k), built from k = j downward
    std::vector<double> term(j + 1);
    double spow = 1.0;
    for (std::size_t k = 0; k <= j; ++k) {
      term[k] = binomial(static_cast<int>(j), static_cast<int>(k)) * spow;
      spow *= s;
    }
    for (std::size_t k = j + 1; k-- > 0;) {
      out[k] += cf * term[k] * cpow;
      cpow *= c;
    }
  }
  return out;
}

}  // namespace momfilt
