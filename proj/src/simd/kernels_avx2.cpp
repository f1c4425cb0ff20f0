// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "sgbh/simd/kernels.hpp"

namespace sgbh::simd {
namespace {

using detail::ipow;

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline __m256d ipow_pd(__m256d x, int e) {
  __m256d result = _mm256_set1_pd(1.0);
  __m256d base = x;
  while (e > 0) {
    if (e & 1) result = _mm256_mul_pd(result, base);
    base = _mm256_mul_pd(base, base);
    e >>= 1;
  }
  return result;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void nonlinear_terms(const double* u, std::size_t n, int delta, double gamma, double* pu_padded,
                     double* cu) {
  pu_padded[0] = 0.0;
  pu_padded[n + 1] = 0.0;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d g = _mm256_set1_pd(gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d xd = ipow_pd(x, delta);
    _mm256_storeu_pd(pu_padded + i + 1, _mm256_mul_pd(xd, x));
    const __m256d c = _mm256_mul_pd(_mm256_mul_pd(x, _mm256_sub_pd(one, xd)), _mm256_sub_pd(xd, g));
    _mm256_storeu_pd(cu + i, c);
  }
  for (; i < n; ++i) {
    const double ud = ipow(u[i], delta);
    pu_padded[i + 1] = ud * u[i];
    cu[i] = u[i] * (1.0 - ud) * (ud - gamma);
  }
}

void assemble_rhs(const double* u, const double* pu_padded, const double* cu, std::size_t n,
                  double conv, double react, double* out) {
  const __m256d vc = _mm256_set1_pd(conv);
  const __m256d vr = _mm256_set1_pd(react);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(pu_padded + i + 2), _mm256_loadu_pd(pu_padded + i));
    __m256d r = _mm256_fnmadd_pd(vc, diff, _mm256_loadu_pd(u + i));
    r = _mm256_fmadd_pd(vr, _mm256_loadu_pd(cu + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = u[i] - conv * (pu_padded[i + 2] - pu_padded[i]) + react * cu[i];
}

void add_scaled_product(double* out, const double* a, const double* b, double scale,
                        std::size_t n) {
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(s, ab, _mm256_loadu_pd(out + i)));
  }
  for (; i < n; ++i) out[i] += scale * a[i] * b[i];
}

void mode_synthesis(const double* basis, const double* coeffs, std::size_t modes, std::size_t n,
                    double* out) {
  std::fill(out, out + n, 0.0);
  for (std::size_t j = 0; j < modes; ++j) {
    const double c = coeffs[j];
    const __m256d vc = _mm256_set1_pd(c);
    const double* row = basis + j * n;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      _mm256_storeu_pd(out + i,
                       _mm256_fmadd_pd(vc, _mm256_loadu_pd(row + i), _mm256_loadu_pd(out + i)));
    }
    for (; i < n; ++i) out[i] += c * row[i];
  }
}

double abs_power_sum(const double* u, std::size_t n, int p) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, ipow_pd(abs_pd(_mm256_loadu_pd(u + i)), p));
  double s = hsum(acc);
  for (; i < n; ++i) s += ipow(std::abs(u[i]), p);
  return s;
}

double max_abs(const double* u, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(u + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, std::abs(u[i]));
  return r;
}

double dissipation_sum(const double* w, std::size_t n, int p) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t count = n + 1;
  for (; i + 4 <= count; i += 4) {
    const __m256d wi = _mm256_loadu_pd(w + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(w + i + 1), wi);
    acc = _mm256_fmadd_pd(ipow_pd(abs_pd(wi), p - 2), _mm256_mul_pd(d, d), acc);
  }
  double s = hsum(acc);
  for (; i < count; ++i) {
    const double d = w[i + 1] - w[i];
    s += ipow(std::abs(w[i]), p - 2) * d * d;
  }
  return s;
}

void matvec_accumulate(const double* a, const double* x, std::size_t rows, std::size_t cols,
                       double scale, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
    }
    double s = hsum(acc);
    for (; c < cols; ++c) s += row[c] * x[c];
    y[r] += scale * s;
  }
}

}  // namespace

const Kernels& avx2_table() {
  static const Kernels table{Isa::Avx2,        "avx2",          nonlinear_terms,
                             assemble_rhs,     add_scaled_product, mode_synthesis,
                             abs_power_sum,    max_abs,         dissipation_sum,
                             matvec_accumulate};
  return table;
}

}  // namespace sgbh::simd
