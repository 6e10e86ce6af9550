#pragma once

#include <atomic>
#include <cstddef>
#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "tailcross/errors.hpp"

namespace tailcross {

/// Runs job(i) for i in [0, count) on up to `parallelism` threads and
/// returns the results in index order.  Jobs must be pure functions of
/// their index (each seeds its own substream), so the collected output is
/// identical for every parallelism degree.
template <class T>
std::vector<T> parallel_map(std::size_t count, std::size_t parallelism,
                            const std::function<T(std::size_t)>& job) {
  if (parallelism < 1) throw domain_error("parallel_map: parallelism >= 1");
  std::vector<T> results(count);
  if (count == 0) return results;
  if (parallelism == 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t workers = std::min(parallelism, count);
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace tailcross
