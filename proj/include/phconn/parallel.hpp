#pragma once

#include <cstddef>
#include <functional>

namespace phconn {

/// Thread count from the PHCONN_THREADS environment variable; 1 if unset or invalid.
int default_thread_count();

/// Runs `chunk(begin, end)` over a partition of [0, count). With threads <= 1
/// the single chunk runs on the calling thread. Chunks must be independent.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& chunk);

}  // namespace phconn
