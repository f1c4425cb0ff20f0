// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgbh/error.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh {

Grid make_grid(std::size_t n_interior) {
  if (n_interior < 3) {
    throw Error(ErrorKind::Degenerate,
                "grid needs at least 3 interior nodes, got " + std::to_string(n_interior));
  }
  Grid g;
  g.n_ = n_interior;
  g.h_ = 1.0 / static_cast<double>(n_interior + 1);
  return g;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

double EigenPair::phi(double x) const {
  return std::numbers::sqrt2 * std::sin(index * std::numbers::pi * x);
}

EigenPair eigenpair(int j) {
  if (j < 1) throw Error(ErrorKind::InvalidArgument, "eigen index must be >= 1");
  const double jp = j * std::numbers::pi;
  return EigenPair{j, jp * jp};
}

Field Field::zeros(const Grid& grid) { return Field{grid, std::vector<double>(grid.size(), 0.0)}; }

Field Field::sample(const Grid& grid, const std::function<double(double)>& f) {
  Field out = zeros(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.node(i));
  return out;
}

Field Field::modes(const Grid& grid, std::span<const std::pair<int, double>> terms) {
  Field out = zeros(grid);
  for (const auto& [j, a] : terms) {
    const EigenPair e = eigenpair(j);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] += a * e.phi(grid.node(i));
  }
  return out;
}

double Field::lp_power(double p) const {
  const double rounded = std::round(p);
  if (rounded == p && p >= 1.0 && p <= 64.0) {
    return grid.h() * simd::active().abs_power_sum(values.data(), values.size(), static_cast<int>(p));
  }
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p);
  return grid.h() * s;
}

double Field::lp_norm(double p) const { return std::pow(lp_power(p), 1.0 / p); }

double Field::sup_norm() const { return simd::active().max_abs(values.data(), values.size()); }

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double inner(const Field& u, const Field& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u.values[i] * v.values[i];
  return u.grid.h() * s;
}

double project(const Field& field, int j) {
  if (j < 1) throw Error(ErrorKind::InvalidArgument, "mode index must be >= 1");
  if (static_cast<std::size_t>(j) > field.size()) {
    throw Error(ErrorKind::Aliasing, "mode " + std::to_string(j) + " exceeds grid resolution " +
                                         std::to_string(field.size()));
  }
  const EigenPair e = eigenpair(j);
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field.values[i] * e.phi(field.grid.node(i));
  return field.grid.h() * s;
}

Field second_difference(const Field& field) {
  const std::size_t n = field.size();
  const double inv_h2 = 1.0 / (field.grid.h() * field.grid.h());
  Field out = Field::zeros(field.grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? field.values[i - 1] : 0.0;
    const double right = i + 1 < n ? field.values[i + 1] : 0.0;
    out.values[i] = (right - 2.0 * field.values[i] + left) * inv_h2;
  }
  return out;
}

}  // namespace sgbh
