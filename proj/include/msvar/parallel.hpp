#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace msvar {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must be
/// independent; callers keep determinism by writing results into slot i.
inline void parallel_for(long n, int jobs,
                         const std::function<void(long)>& fn) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::max<long>(1, std::min<long>(jobs, n)));
  if (workers == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace msvar
