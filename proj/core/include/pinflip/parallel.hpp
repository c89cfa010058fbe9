#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pinflip {

// Calls worker(first, stride) on min(jobs, count) threads; worker j handles
// items j, j + stride, ... so results depend only on the item index. The first
// exception thrown by any worker is rethrown after all threads have joined.
template <class Worker>
void run_strided(int count, int jobs, Worker&& worker) {
  const int n = std::max(1, std::min(jobs, count));
  if (n == 1) {
    worker(0, 1);
    return;
  }
  std::exception_ptr failure;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (int j = 0; j < n; ++j) {
    pool.emplace_back([&, j] {
      try {
        worker(j, n);
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pinflip
