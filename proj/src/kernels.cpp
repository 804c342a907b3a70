#include "veriq/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <limits>
#include <string>

namespace veriq::kernels {

Moments scan_moments_serial(const SignedRelation& relation,
                            const CompiledPredicate& predicate,
                            std::optional<std::size_t> attr) {
  Moments m;
  for (const auto& t : relation.tuples()) {
    if (!predicate.matches(t.values)) continue;
    m.add(attr ? t.values[*attr] : 0);
  }
  return m;
}

Moments scan_moments_parallel(const SignedRelation& relation,
                              const CompiledPredicate& predicate,
                              std::optional<std::size_t> attr, int workers) {
  const auto& tuples = relation.tuples();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(tuples.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  Moments total;
#pragma omp parallel num_threads(threads)
  {
    Moments local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& t = tuples[i];
      if (!predicate.matches(t.values)) continue;
      local.add(attr ? t.values[*attr] : 0);
    }
    // Integer sums are associative; merge order does not matter.
#pragma omp critical(veriq_scan_merge)
    total += local;
  }
  return total;
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  // Exceptions cannot cross the parallel region; keep the lowest-index one.
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(veriq_parallel_for_error)
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

int default_workers() {
  if (const char* env = std::getenv("VERIQ_WORKERS")) {
    try {
      int w = std::stoi(env);
      if (w > 0) return w;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace veriq::kernels
