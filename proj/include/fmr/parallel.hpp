#pragma once

#include <cstddef>
#include <functional>

namespace fmr {

// Global worker-count cap. 0 means "use hardware concurrency".
// Settable from the CLI (--threads) or the FMR_THREADS environment variable.
void set_thread_cap(int n);
int thread_cap();

// Splits [0, count) into contiguous chunks, one per worker. Workers write
// disjoint output ranges, so results do not depend on the worker count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace fmr
