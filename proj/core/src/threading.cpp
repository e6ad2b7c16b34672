// SPDX-License-Identifier: Apache-2.0
#include "mgsa/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mgsa {

int worker_count() {
  if (const char* env = std::getenv("MGSA_THREADS")) {
    int n = std::atoi(env);
    return n >= 1 ? n : 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mgsa
