#pragma once

#include <cstddef>
#include <functional>

namespace isirate {

/// Worker count: ISIRATE_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs task(i) for i in [0, n) on up to `threads` workers. Tasks must not
/// share mutable state; any exception is rethrown on the calling thread
/// (the one with the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task,
                  std::size_t threads = 0);

} // namespace isirate
