#include <cmath>
#include <random>

#include "benchmark/benchmark.h"
#include "nevlab/ldl.hpp"
#include "nevlab/nochka.hpp"
#include "nevlab/zeros.hpp"

using namespace nevlab;

static void BM_CircleAverageLogSingular(benchmark::State& state) {
  // log |e^{it} - 1| has a logarithmic singularity at t = 0.
  CircleIntegrand g{[](real t) { return std::log(std::abs(std::polar(real(1), t) - real(1))); }, {0}};
  for (auto _ : state) benchmark::DoNotOptimize(circle_average(g, kTolSingular));
}
BENCHMARK(BM_CircleAverageLogSingular);

static void BM_CharacteristicExp(benchmark::State& state) {
  auto [f, g] = gallery("exp");
  real r = static_cast<real>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(characteristic(f, g, r, false).T);
}
BENCHMARK(BM_CharacteristicExp)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_CharacteristicLambda(benchmark::State& state) {
  auto [f, g] = gallery("lambda");
  for (auto _ : state) benchmark::DoNotOptimize(characteristic(f, g, 0.99L, false).T);
}
BENCHMARK(BM_CharacteristicLambda)->Unit(benchmark::kMillisecond);

static void BM_LocateZeros(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<GaussRational> roots;
  for (int i = 0; i < state.range(0); ++i)
    roots.emplace_back(rational_from_double(u(rng)), rational_from_double(u(rng)));
  AnalyticFn h = poly_function(Poly::from_roots(roots));
  for (auto _ : state) benchmark::DoNotOptimize(locate_zeros(h, 2).size());
}
BENCHMARK(BM_LocateZeros)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_NochkaWeights(benchmark::State& state) {
  std::vector<Covector> five;
  for (int j = 0; j < 5; ++j) five.push_back({GaussRational(1), GaussRational(j)});
  for (auto _ : state) benchmark::DoNotOptimize(nochka_weights(five, 2).theta);
}
BENCHMARK(BM_NochkaWeights)->Unit(benchmark::kMillisecond);

static void BM_PluckerResidualMoment(benchmark::State& state) {
  auto c = curve_gallery("moment", {{"n", "2"}});
  for (auto _ : state) benchmark::DoNotOptimize(plucker_residual(c, 1, 2));
}
BENCHMARK(BM_PluckerResidualMoment)->Unit(benchmark::kMillisecond);

static void BM_LogDerivativeProximity(benchmark::State& state) {
  auto [f, g] = gallery("quadratic");
  for (auto _ : state) benchmark::DoNotOptimize(logderiv_proximity(f, 2.3L, 2));
}
BENCHMARK(BM_LogDerivativeProximity)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
