#pragma once

#include <cstddef>
#include <vector>

#include <omp.h>

namespace trime {

// Thread policy handed to the parallel sections. Every parallel loop in the
// library writes only to per-item slots, so results never depend on the
// thread count or on scheduling.
struct Parallel {
  int threads = 1;

  template <typename Fn>
  void for_each(std::size_t n, Fn&& fn) const {
    const long long count = static_cast<long long>(n);
    if (threads <= 1 || count < 64) {
      for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
      return;
    }
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  }

  // Deterministic sum: fixed-size blocks are summed independently and the
  // block partials are combined in block order, whatever the thread count.
  template <typename T, typename Fn>
  T block_sum(std::size_t n, T zero, Fn&& term) const {
    constexpr std::size_t kBlock = 1024;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<T> partial(blocks, zero);
    for_each(blocks, [&](std::size_t b) {
      T acc = zero;
      const std::size_t end = (b + 1) * kBlock < n ? (b + 1) * kBlock : n;
      for (std::size_t i = b * kBlock; i < end; ++i) acc += term(i);
      partial[b] = acc;
    });
    T total = zero;
    for (const T& p : partial) total += p;
    return total;
  }
};

}  // namespace trime
