// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

// Data-parallel inner loops of the stepper, the noise synthesis and the
// kernel quadratures. Every entry has a scalar reference implementation and,
// on x86-64, an AVX2/FMA variant. The variant is picked once at startup from
// the CPU feature bits; tests compare the two tables entry by entry.
namespace sgbh::simd {

enum class Isa { Scalar, Avx2 };

struct Kernels {
  Isa isa;
  const char* name;

  // pu_padded has n+2 slots; slots 1..n receive u^(delta+1), slots 0 and n+1 are zeroed.
  // cu receives u (1 - u^delta) (u^delta - gamma).
  void (*nonlinear_terms)(const double* u, std::size_t n, int delta, double gamma,
                          double* pu_padded, double* cu);

  // out[i] = u[i] - conv * (pu_padded[i+2] - pu_padded[i]) + react * cu[i]
  void (*assemble_rhs)(const double* u, const double* pu_padded, const double* cu,
                       std::size_t n, double conv, double react, double* out);

  // out[i] += scale * a[i] * b[i]
  void (*add_scaled_product)(double* out, const double* a, const double* b, double scale,
                             std::size_t n);

  // out[i] = sum_j coeffs[j] * basis[j*n + i]
  void (*mode_synthesis)(const double* basis, const double* coeffs, std::size_t modes,
                         std::size_t n, double* out);

  // sum |u_i|^p for integer p >= 1
  double (*abs_power_sum)(const double* u, std::size_t n, int p);

  double (*max_abs)(const double* u, std::size_t n);

  // sum_{i=0}^{n} |w_i|^(p-2) (w_{i+1} - w_i)^2 over a zero-padded array w of n+2 slots, p >= 2
  double (*dissipation_sum)(const double* padded, std::size_t n, int p);

  // y[r] += scale * sum_c a[r*cols + c] * x[c]
  void (*matvec_accumulate)(const double* a, const double* x, std::size_t rows,
                            std::size_t cols, double scale, double* y);
};

const Kernels& scalar();

/// Null when the AVX2 variant is not compiled in or the CPU lacks AVX2+FMA.
const Kernels* avx2();

/// The table used by the library.
const Kernels& active();

/// Force a table; throws Error(InvalidArgument) if unavailable.
void select(Isa isa);

namespace detail {

inline double ipow(double x, int e) {
  double result = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

}  // namespace detail

}  // namespace sgbh::simd
