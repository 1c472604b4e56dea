#include "ag/util/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ag {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be >= 1");
  g_threads = n;
}

int thread_count() { return g_threads; }

void for_items(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = std::min(g_threads, n);
  if (workers == 1) {
    for (int b = 0; b < n; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&]() {
    for (;;) {
      int b = next.fetch_add(1);
      if (b >= n) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

void for_blocks(int n, const std::function<void(int, int, int)>& fn) {
  int nb = block_count(n);
  for_items(nb, [&](int b) {
    int begin = b * kBlockPaths;
    int end = std::min(n, begin + kBlockPaths);
    fn(b, begin, end);
  });
}

}  // namespace ag
