#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "veriq/authstore.hpp"
#include "veriq/queryeng.hpp"

namespace veriq::kernels {

// Full-scan moment accumulation. The serial version is the reference the
// OpenMP version is tested against; both are exact so results are equal.
Moments scan_moments_serial(const SignedRelation& relation,
                            const CompiledPredicate& predicate,
                            std::optional<std::size_t> attr);
Moments scan_moments_parallel(const SignedRelation& relation,
                              const CompiledPredicate& predicate,
                              std::optional<std::size_t> attr,
                              int workers = 0);

// Relations at least this large are scanned in parallel by eval_exact.
inline constexpr std::size_t kParallelScanThreshold = 1 << 15;

// Runs body(i) for i in [0, n). workers <= 0 uses the OpenMP default,
// workers == 1 is a plain loop. Callers write results into slot i so the
// outcome never depends on scheduling.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body);

// Default worker count: VERIQ_WORKERS when set, else the OpenMP maximum.
int default_workers();

}  // namespace veriq::kernels
