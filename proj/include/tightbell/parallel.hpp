#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace tightbell {

/// Worker count: TIGHTBELL_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
inline unsigned worker_threads() {
  if (const char* env = std::getenv("TIGHTBELL_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Splits [0, total) into `chunks` contiguous ranges and runs fn(chunk, begin, end)
/// on up to `threads` workers. Chunk boundaries depend only on `total` and
/// `chunks`, so callers that merge per-chunk results in chunk order get
/// results independent of the thread count.
template <class Fn>
void for_each_chunk(std::uint64_t total, std::size_t chunks, unsigned threads, Fn&& fn) {
  chunks = std::max<std::size_t>(1, chunks);
  auto bounds = [&](std::size_t c) { return total / chunks * c + std::min<std::uint64_t>(c, total % chunks); };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += threads) fn(c, bounds(c), bounds(c + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tightbell
