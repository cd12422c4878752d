#include <benchmark/benchmark.h>

#include "pmaass/arith.hpp"
#include "pmaass/kloosterman.hpp"
#include "pmaass/special_functions.hpp"

namespace {

void BM_KloostermanSingle(benchmark::State& state) {
  long c = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(pmaass::kloosterman(1, 1, c));
}
BENCHMARK(BM_KloostermanSingle)->Arg(997)->Arg(9973)->Arg(99991);

void BM_KloostermanZetaRow(benchmark::State& state) {
  std::vector<pmaass::KZRow> rows;
  rows.push_back({1, -1, [](long c) { return 1.0 / (double(c) * c); }, 2.0});
  pmaass::KZOptions opt;
  opt.c_max = state.range(0);
  opt.threads = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(pmaass::kloosterman_zeta(11, rows, opt));
}
BENCHMARK(BM_KloostermanZetaRow)
    ->Args({2000, 1})
    ->Args({2000, 4})
    ->Args({20000, 1})
    ->Args({20000, 4});

void BM_BesselJ1(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    if (x > 500.0) x -= 500.0;
    benchmark::DoNotOptimize(pmaass::bessel_j1(x));
  }
}
BENCHMARK(BM_BesselJ1);

void BM_GroupData(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(pmaass::group_data(state.range(0)));
}
BENCHMARK(BM_GroupData)->Arg(11)->Arg(360);

}  // namespace

BENCHMARK_MAIN();
