#pragma once

#include <cstddef>
#include <functional>

namespace organoid {

/// Thread count from the ORGANOID_THREADS environment variable, falling back
/// to the hardware concurrency (at least 1).
unsigned default_thread_count();

/// Calls body(i) for i in [0, n) on up to `threads` threads. Each index is
/// visited exactly once. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace organoid
