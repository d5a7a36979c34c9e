#include "banditvote/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace banditvote {

void parallel_for(long begin, long end, int threads,
                  const std::function<void(long)>& body) {
  const long total = end - begin;
  if (total <= 0) return;
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, total)));
  if (threads == 1) {
    for (long i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  const long chunk = (total + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long lo = begin + t * chunk;
    const long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &body] {
      for (long i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("BANDITVOTE_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace banditvote
