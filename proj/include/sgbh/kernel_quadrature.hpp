// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sgbh/grid.hpp"

namespace sgbh {

/// Grid-to-grid kernel operators. A grid function is read as its piecewise
/// linear interpolant (hat basis, zero at both ends of [0,1]); the kernel is
/// integrated against each hat in closed form with erf, so the weights stay
/// accurate even when sqrt(nu t) is much smaller than h.
class KernelQuadrature {
 public:
  KernelQuadrature(const Grid& grid, double nu);

  const Grid& grid() const noexcept { return grid_; }
  double nu() const noexcept { return nu_; }

  /// Row-major n x n matrix W with W[i,k] = int_0^1 G_nu(t, x_i, y) hat_k(y) dy.
  std::vector<double> hat_weights(double t) const;

  /// Row-major n x n matrix D with D[i,k] = int_0^1 dG_nu/dy(t, x_i, y) hat_k(y) dy.
  std::vector<double> hat_derivative_weights(double t) const;

  /// Both matrices from one pass over the cells.
  void weights(double t, std::vector<double>& w, std::vector<double>& d) const;

  /// int_a^b G_nu(t, x, y) dy in closed form.
  double cell_integral(double t, double x, double a, double b) const;

  /// Number of image pairs needed for 1e-17 truncation at effective time tau.
  static int image_terms(double tau);

 private:
  Grid grid_;
  double nu_;
};

}  // namespace sgbh
