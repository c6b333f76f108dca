#include <benchmark/benchmark.h>

#include "fedcontract/coverage.hpp"
#include "fedcontract/grid_search.hpp"
#include "fedcontract/population.hpp"
#include "fedcontract/random.hpp"

using namespace fedcontract;

namespace {

PointCloud random_cloud(std::size_t dim, std::size_t n) {
  Stream s(42);
  std::vector<double> coords(dim * n);
  for (auto& x : coords) x = s.uniform();
  return PointCloud(dim, std::move(coords));
}

void BM_NearestDistancesSerial(benchmark::State& state) {
  const auto cloud = random_cloud(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::nearest_sq_distances_serial(cloud, 4096, 1));
  state.SetItemsProcessed(state.iterations() * 4096 * state.range(0));
}

void BM_NearestDistancesParallel(benchmark::State& state) {
  const auto cloud = random_cloud(2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::nearest_sq_distances_parallel(cloud, 4096, 1));
  state.SetItemsProcessed(state.iterations() * 4096 * state.range(0));
}

void BM_GridSearch(benchmark::State& state, Backend backend) {
  const auto profile = TypeProfile::from_lists(std::vector{0.5, 1.0}, std::vector{0.5, 0.5}, 1.0);
  const auto curve = RevenueCurve::table({{0.2, 1.0}, {0.4, 2.0}});
  const auto points = static_cast<std::size_t>(state.range(0));
  const auto grid = GridSpec::uniform(2, {0.0, 2.0, points}, {0.0, 2.5, points});
  for (auto _ : state)
    benchmark::DoNotOptimize(
        grid_search_contract(profile, curve, std::vector{0.2, 0.4}, grid, kDefaultTolerance, backend));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.tuple_count()));
}

void BM_RunRound(benchmark::State& state) {
  std::vector<double> thetas, betas(10, 0.1), ms;
  for (int i = 0; i < 10; ++i) {
    thetas.push_back(0.5 + 0.05 * i);
    ms.push_back(0.2 + 0.02 * i);
  }
  const auto profile = TypeProfile::from_lists(thetas, betas, 1.0);
  const auto curve = RevenueCurve::exponential(0.5, 2.0);
  const auto menu = solve_contract(profile, curve, ms);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_round(profile, menu, curve, 10000, RoundMode::stochastic, 1));
}

}  // namespace

BENCHMARK(BM_NearestDistancesSerial)->Arg(200)->Arg(2000);
BENCHMARK(BM_NearestDistancesParallel)->Arg(200)->Arg(2000);
BENCHMARK_CAPTURE(BM_GridSearch, serial, Backend::serial)->Arg(21)->Arg(41);
BENCHMARK_CAPTURE(BM_GridSearch, parallel, Backend::parallel)->Arg(21)->Arg(41);
BENCHMARK(BM_RunRound);

BENCHMARK_MAIN();
