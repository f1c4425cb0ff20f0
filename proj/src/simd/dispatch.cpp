// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>

#include "sgbh/error.hpp"
#include "sgbh/simd/kernels.hpp"

namespace sgbh::simd {

#if defined(SGBH_HAVE_AVX2)
const Kernels& avx2_table();
#endif

const Kernels* avx2() {
#if defined(SGBH_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

std::atomic<const Kernels*>& current() {
  static std::atomic<const Kernels*> table{avx2() ? avx2() : &scalar()};
  return table;
}

}  // namespace

const Kernels& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
  if (isa == Isa::Scalar) {
    current().store(&scalar(), std::memory_order_release);
    return;
  }
  const Kernels* table = avx2();
  if (!table) throw Error(ErrorKind::InvalidArgument, "AVX2 kernels unavailable on this host");
  current().store(table, std::memory_order_release);
}

}  // namespace sgbh::simd
