#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracdens {

// Deterministic parallel map: work item i writes only into slot i, so results
// are identical for any worker count; reductions happen afterwards in index
// order.
template <typename F>
void parallel_for(int n, int workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  workers = std::min(workers, n);
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fracdens
