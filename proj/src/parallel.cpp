#include "grushin/parallel.hpp"

#include <atomic>

namespace grushin {

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_count(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  g_workers.store(n);
}

unsigned worker_count() { return g_workers.load(); }

}  // namespace grushin
