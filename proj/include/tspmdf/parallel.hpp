#pragma once

#include <cstddef>
#include <functional>

namespace tspmdf {

// hardware_concurrency(), at least 1.
int default_thread_count();

// Runs fn(i) for every i in [0, count), split into contiguous chunks across
// `threads` workers. Each index must write only to its own output slots;
// under that discipline results are identical for any worker count, which is
// what lets the pipeline promise thread-count-independent output. The first
// exception thrown by a worker is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace tspmdf
