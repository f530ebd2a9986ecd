#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace trackaudit {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Item state must
/// be independent; callers keep results in preallocated slots indexed by i so
/// output order never depends on scheduling.
template <typename Fn>
void parallel_for(size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  size_t n = std::min<size_t>(static_cast<size_t>(workers), count);
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

}  // namespace trackaudit
