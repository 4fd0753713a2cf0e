#pragma once

#include <cstddef>
#include <functional>

namespace nystromkit {

// Number of worker threads, capped by the NYSTROMKIT_THREADS environment
// variable when set.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Results must be written to pre-allocated
// per-index slots so that aggregation is order-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nystromkit
