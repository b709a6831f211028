#pragma once

#include <cstddef>
#include <functional>

namespace rpd {

/// Worker count: RPD_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Indices are handed out dynamically; callers write results into per-index
/// slots so the outcome never depends on the schedule. The first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace rpd
