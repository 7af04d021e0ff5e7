#pragma once

#include <cstddef>
#include <functional>

namespace polybill {

// Worker count: BILLIARDS_THREADS when set to a positive integer, else the hardware concurrency.
int worker_count();

// Calls body(i) for i in [0, n) on worker_count() threads. Each index runs exactly once;
// callers write results into slot i so the output order does not depend on scheduling.
// The first exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace polybill
