#include <benchmark/benchmark.h>

#include "rdbia/blocks.hpp"
#include "rdbia/rdsolver.hpp"

namespace {

using namespace rdbia;

MarkovChain lazy_chain() {
  return validate_chain({{0.9, 0.1}, {0.3, 0.7}}, {1.0, 0.0});
}

void BM_BlockBuild(benchmark::State& state) {
  const MarkovChain chain = lazy_chain();
  const DistortionSpec ham = hamming_distortion(2);
  const int T = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(block_distribution(chain, ham, T));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BlockBuild)->DenseRange(4, 14, 2)->Complexity();

void BM_BaPoint(benchmark::State& state) {
  const MarkovChain chain = lazy_chain();
  const DistortionSpec ham = hamming_distortion(2);
  const int T = static_cast<int>(state.range(0));
  const BlockSource src = block_distribution(chain, ham, T);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ba_point(src, -2.0));
  }
}
BENCHMARK(BM_BaPoint)->DenseRange(2, 12, 2)->Unit(benchmark::kMillisecond);

void BM_RdAtDistortion(benchmark::State& state) {
  const MarkovChain chain = lazy_chain();
  const DistortionSpec ham = hamming_distortion(2);
  const int T = static_cast<int>(state.range(0));
  const BlockSource src = block_distribution(chain, ham, T);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rd_at_distortion(src, 0.1 * T));
  }
}
BENCHMARK(BM_RdAtDistortion)->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond);

void BM_DZero(benchmark::State& state) {
  const MarkovChain chain = lazy_chain();
  const DistortionSpec ham = hamming_distortion(2);
  const BlockSource src =
      block_distribution(chain, ham, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(d_zero(src));
  }
}
BENCHMARK(BM_DZero)->DenseRange(4, 14, 2);

}  // namespace

BENCHMARK_MAIN();
