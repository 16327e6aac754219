#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace reslat {

// 0: hardware concurrency capped by RES_LAT_THREADS.
unsigned worker_count(unsigned requested);

// Runs f(i) for i < n on up to `threads` workers; f writes into its own slot,
// so results come back in index order.  The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned t = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace reslat
