#include "tvsar/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tvsar {

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  if (n <= 0) return;
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  int first_error_index = n;

  auto run = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        failed.store(true, std::memory_order_relaxed);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TVSAR_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace tvsar
