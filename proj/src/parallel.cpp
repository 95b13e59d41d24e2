#include "gradon/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gradon {

namespace {
std::atomic<int> g_thread_count{1};
}

void set_thread_count(int count) { g_thread_count.store(count); }

int effective_thread_count() {
  if (const char* env = std::getenv("GRADON_THREADS")) {
    const int k = std::atoi(env);
    if (k > 0) return k;
  }
  int k = g_thread_count.load();
  if (k <= 0) k = static_cast<int>(std::thread::hardware_concurrency());
  return k > 0 ? k : 1;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t count = end > begin ? end - begin : 0;
  const int workers = effective_thread_count();
  if (count == 0) return;
  if (workers <= 1 || count < 2) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = begin + c * step;
    const std::size_t hi = std::min(end, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace gradon
