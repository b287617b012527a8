#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace covshift {

unsigned default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
// independent; results must be written to slot i by the caller so the
// outcome does not depend on scheduling.
template<class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body)
{
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool)
    th.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace covshift
