#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qdt::detail {

// Runs body(i) for i in [0, count) on up to `workers` threads. The first
// exception stops the remaining work and is rethrown.
template <class F>
void parallel_for(std::size_t count, int workers, F&& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const int pool = std::max(1, std::min(workers, static_cast<int>(std::min<std::size_t>(count, 1024))));
  if (pool == 1) {
    work();
  } else {
    std::vector<std::thread> th;
    for (int w = 0; w < pool; ++w) th.emplace_back(work);
    for (auto& t : th) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace qdt::detail
