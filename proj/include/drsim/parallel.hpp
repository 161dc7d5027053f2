#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace drsim {

// Runs body(begin, end) over contiguous chunks of [0, n), possibly on several
// threads. Bodies must write only to disjoint per-index slots; with that
// discipline the result is identical for any thread count, including 1.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  std::size_t want = static_cast<std::size_t>(threads);
  if (n == 0) return;
  if (want <= 1 || n < 2 * want) {
    body(std::size_t{0}, n);
    return;
  }
  std::size_t chunk = (n + want - 1) / want;
  std::vector<std::thread> pool;
  pool.reserve(want);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace drsim
