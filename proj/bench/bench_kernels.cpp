// The three OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "effabc/analytic_bounds.hpp"
#include "effabc/power_search.hpp"
#include "effabc/prime_tables.hpp"

using namespace effabc;

namespace {

const PrimeTables& tables() {
  static const PrimeTables t = PrimeTables::build(50'000'000);
  return t;
}

void BM_Sieve(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(PrimeTables::build(static_cast<std::uint64_t>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SieveSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(PrimeTables::build_serial(static_cast<std::uint64_t>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// threads = 1 is the serial reference; the sweep is chunked the same way either way
void BM_SweepF1(benchmark::State& st) {
  const auto& t = tables();
  const int threads = static_cast<int>(st.range(0));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (auto _ : st) benchmark::DoNotOptimize(sweep_f1(200'000, 20'000'000, t));
  omp_set_num_threads(saved);
  st.SetItemsProcessed(st.iterations() * 19'800'000);
}

void BM_Search(benchmark::State& st) {
  const double h = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(search(h, 20, true));
}

void BM_SearchSerial(benchmark::State& st) {
  const double h = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(search_serial(h, 20, true));
}

}  // namespace

BENCHMARK(BM_Sieve)->Arg(10'000'000)->Arg(100'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SieveSerial)->Arg(10'000'000)->Arg(100'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepF1)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Search)->Arg(400)->Arg(450)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchSerial)->Arg(400)->Arg(450)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
