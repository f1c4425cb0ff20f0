// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#include "sgbh/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sgbh {
namespace {

std::atomic<int> g_threads{0};

}  // namespace

int default_threads() {
  const int t = g_threads.load();
  if (t > 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(int threads) { g_threads.store(std::max(0, threads)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  int threads) {
  if (count == 0) return;
  const auto workers = static_cast<std::size_t>(threads > 0 ? threads : default_threads());
  if (workers <= 1 || count == 1) {
    body(0, count);
    return;
  }
  const std::size_t chunk = std::max<std::size_t>(1, count / (workers * 8));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= count) return;
      try {
        body(begin, std::min(count, begin + chunk));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min(workers, (count + chunk - 1) / chunk);
  for (std::size_t w = 1; w < spawn; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sgbh
