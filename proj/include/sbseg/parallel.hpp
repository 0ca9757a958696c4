#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace sbseg {

/// Worker count resolution: explicit request wins, then SBSEG_THREADS, then 1.
int default_threads();

/// Run fn(0..n-1), possibly on several threads. Tasks must write to disjoint
/// slots; results are then identical for any thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace sbseg
