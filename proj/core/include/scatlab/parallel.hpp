#pragma once

#include <cstddef>
#include <functional>

namespace scatlab {

// Thread count from SCATLAB_THREADS, else hardware concurrency (>= 1).
std::size_t thread_count();

// Runs body(i) for i in [0, n). Each index must write only its own output
// slot; results then do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace scatlab
