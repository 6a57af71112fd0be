#pragma once

#include <cstddef>
#include <functional>

namespace uvg {

/// Worker cap: UVG_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend on the worker count, so callers must only write disjoint,
/// per-index results to stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 64);

}  // namespace uvg
