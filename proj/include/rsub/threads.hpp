#pragma once

#include <cstddef>
#include <functional>

namespace rsub {

// Worker cap: min(hardware_concurrency, RATIO_SUBSAMPLER_THREADS if set).
std::size_t worker_limit();

// Runs fn(i) for i in [0, n). Work items must be independent; each writes
// only to its own output slot, so the result does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rsub
