#include "fracdecomp/parallel.hpp"

namespace fracdecomp {

namespace {
std::atomic<int> g_threads{0};
}

int default_thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_default_thread_count(int n) { g_threads.store(n); }

}  // namespace fracdecomp
