#pragma once

#include <cstddef>
#include <functional>

namespace defiers {

// Number of worker threads used by parallel kernels. 0 selects the
// DEFIERS_THREADS environment variable, falling back to the hardware count.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is processed exactly once, so
// results written by index do not depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace defiers
