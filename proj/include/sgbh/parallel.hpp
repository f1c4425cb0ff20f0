// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace sgbh {

/// Worker count used when a call passes threads = 0. Starts at the hardware concurrency.
int default_threads();
void set_default_threads(int threads);

/// Runs body(begin, end) over disjoint chunks covering [0, count). Chunks are
/// claimed dynamically, so callers must write results by index and reduce
/// afterwards. The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  int threads = 0);

}  // namespace sgbh
