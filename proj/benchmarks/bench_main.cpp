#include <benchmark/benchmark.h>

#include "kernelrmt/approximant.hpp"
#include "kernelrmt/kernel_build.hpp"
#include "kernelrmt/spectral.hpp"

using namespace kernelrmt;

namespace {

DataMatrix data(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  return gen_standard(n, n, make_cov(CovSpec::identity(), n), EntryDist::gaussian(), 1);
}

void BM_InnerKernel(benchmark::State& state) {
  const DataMatrix x = data(state);
  for (auto _ : state) benchmark::DoNotOptimize(build_inner_kernel(x, KernelSpec::gaussian(1.0)));
}
BENCHMARK(BM_InnerKernel)->Arg(100)->Arg(400);

void BM_DistanceStrong(benchmark::State& state) {
  const DataMatrix x = data(state);
  const ApproxInputs in = default_inputs(x);
  for (auto _ : state) benchmark::DoNotOptimize(approx_distance_strong(x, KernelSpec::gaussian(1.0), in));
}
BENCHMARK(BM_DistanceStrong)->Arg(100)->Arg(400);

void BM_Eigenvalues(benchmark::State& state) {
  const SymMatrix m = build_inner_kernel(data(state), KernelSpec::gaussian(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(eigvals_sym(m));
}
BENCHMARK(BM_Eigenvalues)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
