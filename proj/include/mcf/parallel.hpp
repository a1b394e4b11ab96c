#ifndef MCF_PARALLEL_HPP
#define MCF_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mcf {

// Number of worker threads: explicit request, else EXPANDER_LAB_THREADS,
// else 1. Results never depend on the thread count; workers only write
// disjoint indices and reductions happen on the calling thread.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EXPANDER_LAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Chunked parallel map over [0, n). fn must be pure per index.
template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  threads = std::min<long>(std::max(threads, 1), std::max<long>(n, 1));
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const long chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long lo = t * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mcf

#endif  // MCF_PARALLEL_HPP
