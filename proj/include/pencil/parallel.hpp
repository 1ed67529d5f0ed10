#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pencil {

/// Run fn(i) for i in [0, n). Results must be written to per-index slots so
/// the outcome is independent of scheduling. workers <= 1 runs inline.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  int k = std::min<std::size_t>(workers, n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(k);
  std::exception_ptr err;
  std::mutex err_mu;
  for (int w = 0; w < k; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace pencil
