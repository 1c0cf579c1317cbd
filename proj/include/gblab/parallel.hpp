#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "gblab/common.hpp"

namespace gblab {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n).  Indices are handed out in fixed-size blocks
/// through an atomic cursor; the block size does not depend on the worker
/// count, so any determinism of the result comes from fn writing only to
/// slots addressed by i (never from scheduling order).
template <class Fn>
void parallel_for(u64 n, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (n == 0) return;
  constexpr u64 kBlock = 64;
  if (workers <= 1 || n <= kBlock) {
    for (u64 i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<u64> cursor{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto body = [&] {
    for (;;) {
      u64 begin = cursor.fetch_add(kBlock, std::memory_order_relaxed);
      if (begin >= n) return;
      u64 end = std::min(begin + kBlock, n);
      try {
        for (u64 i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gblab
