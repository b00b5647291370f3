#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

namespace fracdecomp {

/// Neumaier compensated accumulator; used wherever sums must be
/// reproducible to near machine precision independent of magnitude order.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double total() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

int default_thread_count();
void set_default_thread_count(int n);

namespace detail {
constexpr std::size_t kBlockSize = 8192;

template <class Body>
void run_blocks(std::size_t n_blocks, int threads, Body&& body) {
  if (threads <= 0) threads = default_thread_count();
  if (threads <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) body(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      body(b);
    }
  };
  std::vector<std::thread> pool;
  const int nt = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads), n_blocks));
  pool.reserve(static_cast<std::size_t>(nt) - 1);
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}
}  // namespace detail

/// Element-wise parallel loop; `fn(i)` must write to disjoint state per i.
template <class F>
void parallel_for(std::size_t n, F&& fn, int threads = 0) {
  const std::size_t n_blocks = (n + detail::kBlockSize - 1) / detail::kBlockSize;
  detail::run_blocks(n_blocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * detail::kBlockSize;
    const std::size_t hi = std::min(n, lo + detail::kBlockSize);
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

/// Sum of per_index(i) over [0, n). The index range is split into fixed-size
/// blocks reduced sequentially and combined in block order, so the result is
/// bit-identical for any thread count.
template <class F>
double parallel_block_sum(std::size_t n, F&& per_index, int threads = 0) {
  const std::size_t n_blocks = (n + detail::kBlockSize - 1) / detail::kBlockSize;
  if (n_blocks == 0) return 0.0;
  std::vector<double> partial(n_blocks, 0.0);
  detail::run_blocks(n_blocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * detail::kBlockSize;
    const std::size_t hi = std::min(n, lo + detail::kBlockSize);
    Accumulator acc;
    for (std::size_t i = lo; i < hi; ++i) acc.add(per_index(i));
    partial[b] = acc.total();
  });
  Accumulator acc;
  for (double v : partial) acc.add(v);
  return acc.total();
}

}  // namespace fracdecomp
