#pragma once

#include <thread>
#include <vector>

namespace blocksense {

// Runs fn(i) for i in [0, total) across `threads` workers with static
// striding.  Each index is handled exactly once and writes only its own
// slot, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(long long total, int threads, Fn&& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || total <= 1) {
    for (long long i = 0; i < total; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([t, threads, total, &fn] {
      for (long long i = t; i < total; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace blocksense
