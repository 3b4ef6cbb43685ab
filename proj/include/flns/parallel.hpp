#pragma once

#include <cstddef>
#include <functional>

namespace flns {

/// Number of worker threads used by parallel_for (default 1).
void set_worker_count(int n);
int worker_count();

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
/// worker. Callers must only write to outputs owned by index i, so results do
/// not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace flns
