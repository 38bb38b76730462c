#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "bwkb/types.hpp"

namespace bwkb {

// Static block partition of [0, n) over hardware threads. The first exception
// thrown by any worker is rethrown on the caller's thread.
template <typename Fn>
void parallel_for(Index n, Fn&& fn) {
  const Index workers =
      std::min<Index>(n, std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const Index lo = n * w / workers, hi = n * (w + 1) / workers;
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bwkb
