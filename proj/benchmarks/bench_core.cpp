#include "hen/codec.hpp"
#include "hen/fixtures.hpp"
#include "hen/hopfield.hpp"
#include "hen/kernel_memory.hpp"
#include "hen/linalg.hpp"
#include "hen/metrics.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

void BM_UpdateStep(benchmark::State& state) {
  const auto n = state.range(0);
  const hen::MemoryBank bank(hen::random_unit_rows(n, 256, 1));
  const hen::Vector s = bank.row(0).transpose();
  hen::EnergyParams p;
  for (auto _ : state) benchmark::DoNotOptimize(hen::update_step(s, bank, p));
}
BENCHMARK(BM_UpdateStep)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Retrieve(benchmark::State& state) {
  const hen::MemoryBank bank(hen::random_unit_rows(256, 256, 2));
  hen::Vector q = bank.row(3).transpose();
  q.head(128).setZero();
  hen::EnergyParams p;
  for (auto _ : state) benchmark::DoNotOptimize(hen::retrieve(q, bank, p));
}
BENCHMARK(BM_Retrieve);

void BM_RetrieveBatch(benchmark::State& state) {
  const hen::MemoryBank bank(hen::random_unit_rows(256, 256, 3));
  hen::Matrix q = bank.patterns();
  q.leftCols(128).setZero();
  hen::EnergyParams p;
  for (auto _ : state) benchmark::DoNotOptimize(hen::retrieve_batch(q, bank, p, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_RetrieveBatch)->Arg(1)->Arg(4)->UseRealTime();

void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hen::Image a(hen::ImageShape{side, side, 3});
  hen::Image b(a.shape);
  for (double& v : a.data) v = u(rng);
  for (double& v : b.data) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hen::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(32)->Arg(128);

void BM_KernelMemory(benchmark::State& state) {
  const hen::MemoryBank bank(hen::random_unit_rows(state.range(0), 256, 5));
  for (auto _ : state) benchmark::DoNotOptimize(hen::KernelMemory(bank, hen::KernelParams{}));
}
BENCHMARK(BM_KernelMemory)->Arg(64)->Arg(256);

void BM_ProjectionBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hen::Codec::random_projection(256, 252, 6));
}
BENCHMARK(BM_ProjectionBuild);

void BM_RelativeRank(benchmark::State& state) {
  const hen::Matrix bank = hen::random_unit_rows(256, 252, 7);
  for (auto _ : state) benchmark::DoNotOptimize(hen::relative_rank(bank, bank));
}
BENCHMARK(BM_RelativeRank);

}  // namespace

BENCHMARK_MAIN();
