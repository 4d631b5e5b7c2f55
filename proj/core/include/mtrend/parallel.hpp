#pragma once

#include <cstddef>
#include <functional>

namespace mtrend {

/// Number of workers to use for a request of `threads` (0 = all cores).
unsigned resolve_threads(unsigned threads) noexcept;

/// Runs body(begin, end) over contiguous chunks of [0, count) on up to
/// `threads` workers. Chunk boundaries depend only on `count` and the worker
/// count; callers write results by index so the output never depends on
/// completion order. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mtrend
