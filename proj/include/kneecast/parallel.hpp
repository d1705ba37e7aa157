#pragma once

#include <cstddef>
#include <functional>

namespace kneecast {

/// Worker count from KNEECAST_THREADS (default: hardware concurrency, min 1).
std::size_t thread_budget();

/// Runs fn(i) for i in [0, n) on up to thread_budget() workers. Each index is
/// executed exactly once; callers must write results into per-index slots so
/// that any later reduction happens in a fixed order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kneecast
