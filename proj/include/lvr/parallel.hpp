#pragma once

#include <omp.h>

#include <cstddef>
#include <cstdint>
#include <exception>

namespace lvr {

/// Runs body(i) for i in [0, n) on the OpenMP team. If any call throws, the
/// exception from the lowest index is rethrown after the loop, so error
/// reporting does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::size_t error_index = n;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lvr_parallel_for_error)
      {
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Thread count for subsequent parallel regions; 0 leaves the OpenMP default.
inline void set_thread_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace lvr
