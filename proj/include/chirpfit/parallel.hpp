#pragma once

#include <cstddef>
#include <functional>

namespace chirpfit {

// Effective worker count: the CHIRPFIT_THREADS environment variable when it
// parses as a positive integer, hardware concurrency when it is unset, "0",
// or unparseable. Always at least 1.
[[nodiscard]] unsigned worker_count();

// Runs fn(i) for every i in [0, n), distributing indices over worker_count()
// threads. Each index runs exactly once; callers keep cross-index state
// disjoint (e.g. one output slot per index) so results cannot depend on the
// schedule. Nested calls from inside a worker run inline on the calling
// thread. The first exception thrown by fn is rethrown after all workers
// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace chirpfit
