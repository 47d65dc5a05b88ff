#pragma once

#include <cstddef>
#include <functional>

namespace renvol {

/// Worker count: hardware concurrency, capped by RENVOL_THREADS when set.
int thread_count();

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n).
/// Each index is processed exactly once and results written per index are
/// independent of the chunking, so outputs do not depend on thread count.
void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body, size_t min_chunk = 16);

} // namespace renvol
