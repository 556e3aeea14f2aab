#pragma once

#include <cstddef>
#include <functional>

namespace graphfuse {

// Worker count: GSF_THREADS if set, else hardware concurrency (at least 1).
int worker_count();

// Runs body(i) for i in [0, n) over worker_count() threads; exceptions are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace graphfuse
