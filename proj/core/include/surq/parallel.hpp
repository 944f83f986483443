#pragma once

#include <functional>

namespace surq {

// Worker threads used by parallel_for: the SURQ_THREADS environment variable
// when set, otherwise the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n). Results must go to per-index storage; the
// partitioning is contiguous and the outcome does not depend on the number
// of workers.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace surq
