#pragma once

// Finite-difference weights on arbitrary (possibly non-uniform) stencils.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rqt::numerics {

/// Fornberg's recursion: weights[d][j] approximates the d-th derivative at z
/// from samples at nodes[j], for d = 0..max_order.
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes,
                                                         std::size_t max_order) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Derivative of order `order` at point `centre` of the sample arrays, using
/// the `width` samples centred on it. Abscissae are rescaled to unit spacing
/// and ordinates shifted to the centre value before weighting.
inline double stencil_derivative(std::span<const double> t, std::span<const double> x, std::size_t centre,
                                 std::size_t width, std::size_t order) {
  const std::size_t half = width / 2;
  const double scale = (t[centre + 1] - t[centre - 1]) / 2.0;
  std::vector<double> nodes(width);
  for (std::size_t j = 0; j < width; ++j) nodes[j] = (t[centre - half + j] - t[centre]) / scale;
  const auto w = fornberg_weights(0.0, nodes, order);
  double acc = 0.0;
  for (std::size_t j = 0; j < width; ++j) acc += w[order][j] * (x[centre - half + j] - x[centre]);
  double denom = 1.0;
  for (std::size_t k = 0; k < order; ++k) denom *= scale;
  return acc / denom;
}

/// Five-point central first and second derivatives of f at x with step h.
template <class F>
std::array<double, 2> central_derivatives(F&& f, double x, double h) {
  const double fm2 = f(x - 2 * h), fm1 = f(x - h), f0 = f(x), fp1 = f(x + h), fp2 = f(x + 2 * h);
  const double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
  return {d1, d2};
}

}  // namespace rqt::numerics
