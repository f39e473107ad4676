#pragma once

#include <cstddef>
#include <functional>

namespace antforest {

// Honors the ANTFOREST_WORKERS environment variable, otherwise the hardware
// concurrency. Always at least 1.
std::size_t default_worker_count();

// Runs fn(i) for i in [0, count). Work items must not share mutable state;
// every caller in this project derives per-item RNG streams, so results are
// identical for any worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t workers = 0);

}  // namespace antforest
