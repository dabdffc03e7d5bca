#pragma once

#include <cstddef>
#include <functional>

namespace autoreson {

// Number of worker threads: the AUTORESON_THREADS environment variable if set
// to a positive integer, otherwise the hardware concurrency (at least 1).
unsigned worker_count();

// Runs body(i) for i in [0, n) across worker_count() threads.  Iterations are
// dealt in contiguous blocks; bodies must only write to per-index slots so
// results are independent of the thread count.  Exceptions from bodies are
// rethrown (the first one) after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace autoreson
