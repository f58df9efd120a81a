#include <benchmark/benchmark.h>

#include "mlcs/core/rng.hpp"
#include "mlcs/linops/daubechies.hpp"
#include "mlcs/linops/kernels.hpp"
#include "mlcs/linops/operators.hpp"

using namespace mlcs;

namespace {

CVec random_vec(Index n, std::uint64_t seed) {
  Rng rng(seed);
  CVec x(n);
  for (auto& v : x) v = cplx(rng.normal(), rng.normal());
  return x;
}

void BM_Dft1dFast(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  CVec x = random_vec(n, 1);
  for (auto _ : st) {
    kernels::dft_1d(x, false);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_Dft1dReference(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  CVec x = random_vec(n, 1);
  for (auto _ : st) benchmark::DoNotOptimize(reference::dft_1d(x, false));
}

void BM_Dft2dFast(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  CVec x = random_vec(n * n, 2);
  for (auto _ : st) {
    kernels::dft_2d(x, n, false);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_Dft2dReference(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  CVec x = random_vec(n * n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::dft_2d(x, n, false));
}

void BM_FwhtFast(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  CVec x = random_vec(n, 3);
  for (auto _ : st) {
    kernels::fwht_sequency_1d(x, false);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_FwhtReference(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  CVec x = random_vec(n, 3);
  for (auto _ : st) benchmark::DoNotOptimize(reference::fwht_sequency_1d(x));
}

void BM_Dwt2dFast(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  const CVec x = random_vec(n * n, 4);
  CVec out(n * n);
  const auto f = kernels::make_qmf(daubechies_lowpass(4));
  for (auto _ : st) {
    kernels::dwt_2d_forward(x, out, n, f, 4);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Dwt2dReference(benchmark::State& st) {
  const Index n = static_cast<Index>(st.range(0));
  const CVec x = random_vec(n * n, 4);
  for (auto _ : st) benchmark::DoNotOptimize(reference::dwt_2d_forward(x, n, daubechies_lowpass(4), 4));
}

void BM_BernoulliApply(benchmark::State& st) {
  const Index rows = static_cast<Index>(st.range(0));
  const DenseRandomOp A(RandomDist::Bernoulli, rows, 4 * rows, 5);
  const CVec x = random_vec(4 * rows, 6);
  CVec y(rows);
  for (auto _ : st) {
    A.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_BernoulliAdjoint(benchmark::State& st) {
  const Index rows = static_cast<Index>(st.range(0));
  const DenseRandomOp A(RandomDist::Bernoulli, rows, 4 * rows, 5);
  const CVec y = random_vec(rows, 7);
  CVec x(4 * rows);
  for (auto _ : st) {
    A.adjoint(y, x);
    benchmark::DoNotOptimize(x.data());
  }
}

}  // namespace

BENCHMARK(BM_Dft1dFast)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_Dft1dReference)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_Dft2dFast)->RangeMultiplier(2)->Range(64, 256);
BENCHMARK(BM_Dft2dReference)->RangeMultiplier(2)->Range(64, 256);
BENCHMARK(BM_FwhtFast)->RangeMultiplier(8)->Range(1 << 10, 1 << 20);
BENCHMARK(BM_FwhtReference)->RangeMultiplier(8)->Range(1 << 10, 1 << 14);
BENCHMARK(BM_Dwt2dFast)->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(BM_Dwt2dReference)->RangeMultiplier(2)->Range(128, 1024);
BENCHMARK(BM_BernoulliApply)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_BernoulliAdjoint)->RangeMultiplier(4)->Range(256, 4096);

BENCHMARK_MAIN();
