#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace vkplate {

/// Runs fn(i) for i in [0, n). Workers pull indices from a shared counter and
/// must write only to slot i, so results are independent of the thread count;
/// any reduction happens afterwards in index order.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = std::min<int>(threads, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace vkplate
