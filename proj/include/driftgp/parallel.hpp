#pragma once

#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace driftgp {

/// Selects the OpenMP path or the serial reference path of a data-parallel
/// routine. Both paths produce bitwise-identical results.
enum class Execution { Serial, Parallel };

inline std::size_t available_threads() {
#ifdef _OPENMP
  return static_cast<std::size_t>(omp_get_max_threads());
#else
  return 1;
#endif
}

/// Calls f(i) for i in [0, n). Iterations must write disjoint outputs.
template <typename F>
void parallel_for(std::size_t n, Execution exec, F&& f) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace driftgp
