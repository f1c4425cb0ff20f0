// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sgbh {

/// Uniform interior mesh of [0,1] with homogeneous Dirichlet boundary.
/// Node i (0-based) sits at x = (i+1)h; boundary values are implicit zeros.
class Grid {
 public:
  Grid() = default;

  std::size_t size() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }
  std::vector<double> nodes() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  friend Grid make_grid(std::size_t n_interior);
  std::size_t n_ = 0;
  double h_ = 0.0;
};

/// Throws Error(Degenerate) for n_interior < 3.
Grid make_grid(std::size_t n_interior);

/// Dirichlet eigenpair of -d^2/dx^2 on [0,1]: lambda_j = j^2 pi^2, phi_j = sqrt(2) sin(j pi x).
struct EigenPair {
  int index = 1;
  double lambda = 0.0;
  double phi(double x) const;
};

EigenPair eigenpair(int j);

/// Spatial state on a grid.
struct Field {
  Grid grid;
  std::vector<double> values;

  static Field zeros(const Grid& grid);
  static Field sample(const Grid& grid, const std::function<double(double)>& f);
  /// Sum of a_j phi_j for (j, a_j) pairs.
  static Field modes(const Grid& grid, std::span<const std::pair<int, double>> terms);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  /// h * sum |u_i|^p
  double lp_power(double p) const;
  double lp_norm(double p) const;
  double sup_norm() const;
  bool all_finite() const;
};

/// Discrete L2 inner product h * sum u_i v_i.
double inner(const Field& u, const Field& v);

/// Midpoint-rule projection onto phi_j. Throws Error(Aliasing) when j > n.
double project(const Field& field, int j);

/// Dirichlet second difference (u_{i+1} - 2u_i + u_{i-1}) / h^2 with zero ghosts.
Field second_difference(const Field& field);

}  // namespace sgbh
