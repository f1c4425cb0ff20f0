// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>

namespace sgbh::quad {

/// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGL8Nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGL8Weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

/// Composite 8-point Gauss-Legendre over [a, b] split into equal panels.
template <class F>
double composite_gl8(F&& f, double a, double b, int panels) {
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * width;
    const double half = 0.5 * width;
    double s = 0.0;
    for (std::size_t q = 0; q < kGL8Nodes.size(); ++q) s += kGL8Weights[q] * f(mid + half * kGL8Nodes[q]);
    total += half * s;
  }
  return total;
}

}  // namespace sgbh::quad
