#pragma once

#include <cstddef>
#include <functional>

namespace scrambler {

// Worker cap from SCRAMBLER_THREADS (unset or 0 = hardware concurrency).
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to max_workers threads (0 = worker_count()).
// Each index must write only its own output slot; the caller then reduces in
// index order, which keeps results independent of the schedule. If any body
// throws, the exception from the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t max_workers = 0);

}  // namespace scrambler
