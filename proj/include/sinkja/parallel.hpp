#ifndef SINKJA_PARALLEL_HPP
#define SINKJA_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace sinkja {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, count) split into contiguous static chunks, one
// per worker. Results are bitwise independent of the thread count as long as
// bodies touch disjoint state, which is how every caller in this library is
// written (reductions stay inside a single index).
template <class F>
void par_for(std::size_t count, unsigned threads, F&& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count < 2 * threads) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    if (lo >= count) break;
    const std::size_t hi = lo + chunk < count ? lo + chunk : count;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sinkja

#endif
