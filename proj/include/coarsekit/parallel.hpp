#ifndef COARSEKIT_PARALLEL_HPP
#define COARSEKIT_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace coarsekit {

/// Worker count for internal all-pairs scans. Results are required to be
/// bitwise identical to the sequential order, so only order-independent
/// reductions may use it. Default 1.
void set_worker_count(int jobs);
int worker_count();

/// Runs fn(begin, end) over a partition of [0, n); sequential when the worker
/// count is 1 or the range is small. Exceptions from workers are rethrown.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace coarsekit

#endif
