#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace grassdim {

/// Number of worker threads to use: the GRASSDIM_THREADS environment
/// variable if set (clamped to >= 1), otherwise the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("GRASSDIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs fn(i) for i in [0, count) on up to worker_count() threads.
///
/// Results must be written by `fn` into pre-sized slots indexed by i; the
/// caller then folds them in index order.  Work is handed out through an
/// atomic counter, so scheduling varies between runs, but because every
/// task is a pure function of its index the aggregate is not.
inline void parallel_for_indexed(std::size_t count,
                                 const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace grassdim
