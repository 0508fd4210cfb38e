#pragma once

#include <cstddef>
#include <functional>

namespace relaxstab {

/// Worker count: RELAXSTAB_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() workers. Results must be
/// written to per-index slots; the first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace relaxstab
