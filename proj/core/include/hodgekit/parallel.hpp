#pragma once

#include <cstddef>
#include <functional>

namespace hodgekit {

/// Worker count: HODGEKIT_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs fn(i) for i in [0, n). Work items must write only to their own slot;
/// the call returns after all items finish and rethrows the first exception
/// by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hodgekit
