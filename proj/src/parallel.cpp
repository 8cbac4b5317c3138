#include "sun/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace sun {

void run_chunks(int n_chunks, int threads, const std::function<void(int)>& fn) {
  if (n_chunks <= 0) return;
  if (threads <= 1 || n_chunks == 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  const int workers = std::min(threads, n_chunks);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int c = next.fetch_add(1);
        if (c >= n_chunks) return;
        fn(c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sun
