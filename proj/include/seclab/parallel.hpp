#pragma once

#include <cstddef>
#include <functional>

namespace seclab {

/// Worker cap from SECRECY_LAB_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker threads. Callers write
/// results into slot i so aggregation order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace seclab
