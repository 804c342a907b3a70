// Serial vs OpenMP kernels. Run with OMP_NUM_THREADS to pick the team size.
#include <benchmark/benchmark.h>

#include <map>

#include "veriq/census.hpp"
#include "veriq/kernels.hpp"
#include "veriq/simlab.hpp"

namespace {

const veriq::SignedRelation& relation(std::size_t rows) {
  static std::map<std::size_t, veriq::SignedRelation> cache;
  auto it = cache.find(rows);
  if (it == cache.end()) {
    const auto t = veriq::gen_census_like(rows, 11);
    it = cache.emplace(rows, veriq::sign_relation(t.schema, t.rows,
                                                  veriq::OwnerKey::derived(11)))
             .first;
  }
  return it->second;
}

const veriq::Query& sum_q6() {
  static const veriq::Query q = veriq::census_archetype_queries()[5].query;
  return q;
}

struct ScanArgs {
  veriq::CompiledPredicate predicate;
  std::size_t attr;
};

ScanArgs scan_args(const veriq::SignedRelation& rel) {
  return {veriq::CompiledPredicate(sum_q6().predicate, rel.schema()),
          rel.schema().require(sum_q6().attr)};
}

void BM_ScanSerial(benchmark::State& state) {
  const auto& rel = relation(static_cast<std::size_t>(state.range(0)));
  const ScanArgs a = scan_args(rel);
  for (auto _ : state)
    benchmark::DoNotOptimize(veriq::kernels::scan_moments_serial(rel, a.predicate, a.attr));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScanParallel(benchmark::State& state) {
  const auto& rel = relation(static_cast<std::size_t>(state.range(0)));
  const ScanArgs a = scan_args(rel);
  for (auto _ : state)
    benchmark::DoNotOptimize(veriq::kernels::scan_moments_parallel(rel, a.predicate, a.attr));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ErrorRateCurve(benchmark::State& state) {
  const auto& rel = relation(100000);
  const auto eps = veriq::default_epsilon_grid();
  veriq::ErrorRateRun run;
  run.trials = 100;
  run.verifier_k = 1000;
  run.sketch_seed = 1;
  run.cheat_seed = 2;
  run.workers = static_cast<int>(state.range(0));
  const auto key = veriq::OwnerKey::derived(11);
  for (auto _ : state)
    benchmark::DoNotOptimize(veriq::error_rate_curve(
        rel, sum_q6(), eps, veriq::strategy::LaplaceCheat{10}, run, key));
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Arg(1 << 15)->Arg(1 << 17)->Arg(1 << 19);
BENCHMARK(BM_ScanParallel)->Arg(1 << 15)->Arg(1 << 17)->Arg(1 << 19);
// Argument is the worker count; 0 means the OpenMP default.
BENCHMARK(BM_ErrorRateCurve)->Arg(1)->Arg(0);

BENCHMARK_MAIN();
