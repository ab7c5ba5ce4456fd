#pragma once

#include <cstddef>
#include <functional>

namespace prunekit {

/// Worker count: hardware concurrency, capped by the PRUNEKIT_THREADS
/// environment variable when set. Always >= 1.
std::size_t worker_count();

/// Calls body(i) for every i in [0, n), split into contiguous static chunks
/// across worker_count() threads. Each index is visited exactly once, so
/// bodies that write only to slot i produce schedule-independent results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace prunekit
