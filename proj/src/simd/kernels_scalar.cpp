// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "sgbh/simd/kernels.hpp"

namespace sgbh::simd {
namespace {

using detail::ipow;

void nonlinear_terms(const double* u, std::size_t n, int delta, double gamma, double* pu_padded,
                     double* cu) {
  pu_padded[0] = 0.0;
  pu_padded[n + 1] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ud = ipow(u[i], delta);
    pu_padded[i + 1] = ud * u[i];
    cu[i] = u[i] * (1.0 - ud) * (ud - gamma);
  }
}

void assemble_rhs(const double* u, const double* pu_padded, const double* cu, std::size_t n,
                  double conv, double react, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] - conv * (pu_padded[i + 2] - pu_padded[i]) + react * cu[i];
  }
}

void add_scaled_product(double* out, const double* a, const double* b, double scale,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += scale * a[i] * b[i];
}

void mode_synthesis(const double* basis, const double* coeffs, std::size_t modes, std::size_t n,
                    double* out) {
  std::fill(out, out + n, 0.0);
  for (std::size_t j = 0; j < modes; ++j) {
    const double c = coeffs[j];
    const double* row = basis + j * n;
    for (std::size_t i = 0; i < n; ++i) out[i] += c * row[i];
  }
}

double abs_power_sum(const double* u, std::size_t n, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += ipow(std::abs(u[i]), p);
  return s;
}

double max_abs(const double* u, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

double dissipation_sum(const double* w, std::size_t n, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double d = w[i + 1] - w[i];
    s += ipow(std::abs(w[i]), p - 2) * d * d;
  }
  return s;
}

void matvec_accumulate(const double* a, const double* x, std::size_t rows, std::size_t cols,
                       double scale, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] += scale * s;
  }
}

}  // namespace

const Kernels& scalar() {
  static const Kernels table{Isa::Scalar,      "scalar",        nonlinear_terms,
                             assemble_rhs,     add_scaled_product, mode_synthesis,
                             abs_power_sum,    max_abs,         dissipation_sum,
                             matvec_accumulate};
  return table;
}

}  // namespace sgbh::simd
