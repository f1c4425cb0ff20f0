// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/kernel_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgbh/error.hpp"

namespace sgbh {
namespace {

// erf(hi) - erf(lo) without cancellation in the tails.
double erf_diff(double lo, double hi) {
  if (lo > 0.0) return std::erfc(lo) - std::erfc(hi);
  if (hi < 0.0) return std::erfc(-hi) - std::erfc(-lo);
  return std::erf(hi) - std::erf(lo);
}

// Zeroth and first moments of the signed image sum over [a, b]:
//   m0 = int_a^b G dy,   m1 = int_a^b G (y - a) dy.
struct CellMoments {
  double m0 = 0.0;
  double m1 = 0.0;
};

CellMoments cell_moments(double tau, double x, double a, double b, int images) {
  const double root = 2.0 * std::sqrt(tau);
  const double spread = std::sqrt(tau / std::numbers::pi);
  const double inv4tau = 1.0 / (4.0 * tau);
  CellMoments out;
  auto accumulate = [&](double center, double sign) {
    const double lo = (a - center) / root;
    const double hi = (b - center) / root;
    const double m0 = 0.5 * erf_diff(lo, hi);
    const double ea = std::exp(-(a - center) * (a - center) * inv4tau);
    const double eb = std::exp(-(b - center) * (b - center) * inv4tau);
    // int (y - a) N dy = int (y - c) N dy + (c - a) int N dy
    const double m1 = spread * (ea - eb) + (center - a) * m0;
    out.m0 += sign * m0;
    out.m1 += sign * m1;
  };
  for (int m = -images; m <= images; ++m) {
    accumulate(x + 2.0 * m, 1.0);
    accumulate(2.0 * m - x, -1.0);
  }
  return out;
}

}  // namespace

KernelQuadrature::KernelQuadrature(const Grid& grid, double nu) : grid_(grid), nu_(nu) {
  if (!(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "diffusivity must be positive");
}

int KernelQuadrature::image_terms(double tau) {
  return std::max(1, static_cast<int>(std::ceil((std::sqrt(160.0 * tau) + 1.0) / 2.0)));
}

double KernelQuadrature::cell_integral(double t, double x, double a, double b) const {
  if (!(t > 0.0)) throw Error(ErrorKind::SingularTime, "kernel quadrature at t <= 0");
  const double tau = nu_ * t;
  return cell_moments(tau, x, a, b, image_terms(tau)).m0;
}

void KernelQuadrature::weights(double t, std::vector<double>& w, std::vector<double>& d) const {
  if (!(t > 0.0)) throw Error(ErrorKind::SingularTime, "kernel quadrature at t <= 0");
  const std::size_t n = grid_.size();
  const double h = grid_.h();
  const double tau = nu_ * t;
  const int images = image_terms(tau);
  w.assign(n * n, 0.0);
  d.assign(n * n, 0.0);
  std::vector<CellMoments> cells(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.node(i);
    for (std::size_t j = 0; j <= n; ++j) {
      cells[j] = cell_moments(tau, x, static_cast<double>(j) * h, static_cast<double>(j + 1) * h,
                              images);
    }
    for (std::size_t k = 0; k < n; ++k) {
      const CellMoments& left = cells[k];
      const CellMoments& right = cells[k + 1];
      w[i * n + k] = left.m1 / h + right.m0 - right.m1 / h;
      d[i * n + k] = (right.m0 - left.m0) / h;
    }
  }
}

std::vector<double> KernelQuadrature::hat_weights(double t) const {
  std::vector<double> w, d;
  weights(t, w, d);
  return w;
}

std::vector<double> KernelQuadrature::hat_derivative_weights(double t) const {
  std::vector<double> w, d;
  weights(t, w, d);
  return d;
}

}  // namespace sgbh
