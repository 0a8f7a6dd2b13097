#pragma once
// Deterministic trial parallelism: trials write into preassigned slots and
// aggregation happens after the join with a fixed-shape pairwise sum, so
// results are bitwise identical for every value of GDLAB_THREADS.

#include <cstdint>

#include <functional>

namespace gdlab {

// Worker count from the GDLAB_THREADS environment variable; 1 when unset,
// empty, or unparsable. Clamped to [1, 256].
int thread_count();

// Runs fn(i) for i in [0, count) across thread_count() workers in contiguous
// chunks. fn must only touch slot i of shared state. Exceptions propagate
// (the first one observed) after all workers join.
void parallel_for_indexed(std::int64_t count,
                          const std::function<void(std::int64_t)>& fn);

}  // namespace gdlab
