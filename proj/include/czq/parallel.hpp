#ifndef CZQ_PARALLEL_HPP
#define CZQ_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace czq {

// Thread count from CZQ_THREADS, else the hardware count.
inline int default_thread_count() {
  if (const char* env = std::getenv("CZQ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(lo, hi) on contiguous chunks covering [0, n). Results must not depend on the split.
template <class Fn>
void parallel_chunks(int n, int threads, Fn&& fn) {
  threads = std::clamp(threads <= 0 ? default_thread_count() : threads, 1, std::max(n, 1));
  if (threads == 1) {
    fn(0, n);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  parallel_chunks(n, threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace czq

#endif
