#pragma once

#include <cstddef>
#include <functional>

namespace wig {

// Worker cap for slice-parallel loops. 0 means "read WIG_THREADS, else hardware".
void set_threads(int n);
int threads();

// Runs body(i) for i in [0, count). Slices are disjoint, so results never
// depend on the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wig
