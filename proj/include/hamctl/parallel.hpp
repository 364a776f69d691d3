#pragma once

#include <cstddef>
#include <functional>

namespace hamctl {

/// Worker cap: HAMCTL_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index runs
/// exactly once; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace hamctl
