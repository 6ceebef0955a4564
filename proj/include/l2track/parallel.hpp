#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "l2track/detail/common.hpp"

namespace l2track {

/// Runs body(i) for i in [0, n). Work items must be independent; callers get
/// determinism by writing results into per-index slots.
inline void parallel_for(u64 n, unsigned threads, const std::function<void(u64)>& body) {
  if (threads <= 1 || n <= 1) {
    for (u64 i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<u64>(threads, n));
  std::atomic<u64> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const u64 i = next.fetch_add(1);
        if (i >= n || failed.load(std::memory_order_relaxed)) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace l2track
