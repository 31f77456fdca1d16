#include "bhs/common.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace bhs {

int worker_thread_count() {
  if (const char* env = std::getenv("BLOCH_HS_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

namespace {
thread_local int g_parallel_depth = 0;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  int workers = worker_thread_count();
  // Nested parallel sections run serially to keep the thread count bounded.
  if (workers <= 1 || n <= 1 || g_parallel_depth > 0) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  if (workers > n) workers = n;
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      g_parallel_depth = 1;
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace bhs
