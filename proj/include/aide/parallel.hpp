#pragma once
// Fork-join helper over an index range. Thread count comes from
// AIDE_THREADS (defaults to hardware concurrency). Work items must write
// disjoint state; results are independent of the thread count.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace aide {

inline int worker_count() {
  if (const char* env = std::getenv("AIDE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t)>& body) {
  const std::size_t n = end > begin ? end - begin : 0;
  if (n == 0) return;
  const int workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = begin + w; i < end; i += workers) body(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace aide
