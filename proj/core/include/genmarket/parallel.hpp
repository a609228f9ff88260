#pragma once

#include <cstddef>
#include <functional>

namespace genmarket {

/// Worker cap: GENMARKET_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs fn(0..n_tasks-1), possibly concurrently. Tasks must write disjoint
/// outputs; callers reduce per-task partials in index order.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& fn);

}  // namespace genmarket
