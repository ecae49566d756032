#pragma once

#include <cstdint>
#include <functional>

namespace sawbound {

// Worker count from SAWBOUND_THREADS, else hardware concurrency, else 1.
int default_thread_count();

// Runs fn(0..count-1) on up to `threads` workers. Indices are handed out
// atomically; callers own disjoint output slots per index, so results are
// deterministic regardless of scheduling. Exceptions from workers are
// rethrown on the calling thread.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace sawbound
