#pragma once

#include <cstddef>
#include <functional>

namespace egomwf {

// Worker count: EGOMWF_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t default_thread_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers. Work is split into
// contiguous index ranges, so the assignment is deterministic. The first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace egomwf
