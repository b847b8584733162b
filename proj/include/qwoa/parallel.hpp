#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qwoa {

// Worker count for data-parallel loops: QWOA_WORKERS env var, else 1.
// The default of 1 keeps every run single-threaded unless asked otherwise.
inline int default_worker_count() {
  if (const char* env = std::getenv("QWOA_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

// Partitions [begin, end) into fixed-size chunks and hands them out to
// `workers` threads. Chunk boundaries do not depend on the worker count, so
// callers that accumulate per-chunk partials and merge them in chunk order
// get bit-identical results for any worker count.
//
// body(chunk_index, lo, hi) must be safe to call concurrently for distinct
// chunks.
inline constexpr std::uint64_t kParallelChunk = 1u << 16;

inline std::uint64_t chunk_count(std::uint64_t begin, std::uint64_t end) {
  if (end <= begin) return 0;
  return (end - begin + kParallelChunk - 1) / kParallelChunk;
}

template <class Body>
void parallel_for_chunks(std::uint64_t begin, std::uint64_t end, int workers,
                         Body&& body) {
  const std::uint64_t chunks = chunk_count(begin, end);
  if (chunks == 0) return;
  if (workers <= 1 || chunks == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) {
      const std::uint64_t lo = begin + c * kParallelChunk;
      const std::uint64_t hi = std::min(end, lo + kParallelChunk);
      body(c, lo, hi);
    }
    return;
  }
  std::vector<std::thread> pool;
  const int nthreads = static_cast<int>(
      std::min<std::uint64_t>(chunks, static_cast<std::uint64_t>(workers)));
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t c = static_cast<std::uint64_t>(w); c < chunks;
           c += static_cast<std::uint64_t>(nthreads)) {
        const std::uint64_t lo = begin + c * kParallelChunk;
        const std::uint64_t hi = std::min(end, lo + kParallelChunk);
        body(c, lo, hi);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace qwoa
