// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "qnorm/multiplicativity.hpp"

using namespace qnorm;

namespace {

Matrix fixed_psd(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_psd(rng, d);
}

void BM_schatten_norm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix a = fixed_psd(d, 1);
  for (auto _ : state) benchmark::DoNotOptimize(schatten_norm(a, 3.0));
}
BENCHMARK(BM_schatten_norm)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_psd_power(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix a = fixed_psd(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psd_power(a, 2.5));
}
BENCHMARK(BM_psd_power)->Arg(8)->Arg(32);

void BM_kron(benchmark::State& state) {
  const Matrix a = fixed_psd(8, 3);
  const Matrix b = fixed_psd(8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kron(a, b));
}
BENCHMARK(BM_kron);

void BM_partial_trace(benchmark::State& state) {
  const Matrix m = fixed_psd(36, 5);
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(m, 6, 6, 1));
}
BENCHMARK(BM_partial_trace);

void BM_apply(benchmark::State& state) {
  const EBMap eb = random_eb(3, 3, 3, EBClass::general, 6, true);
  const SuperOp ops[] = {SuperOp(eb), SuperOp(eb_to_kraus(eb)),
                         SuperOp(choi(SuperOp(eb)), 3, 3)};
  const SuperOp& op = ops[state.range(0)];
  const Matrix a = fixed_psd(3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(a));
}
BENCHMARK(BM_apply)->Arg(0)->Arg(1)->Arg(2);  // eb, kraus, choi

void BM_lieb_thirring(benchmark::State& state) {
  Rng rng(8);
  const Matrix b = random_gaussian(rng, 6, 6);
  const Matrix c = random_psd(rng, 6);
  for (auto _ : state) benchmark::DoNotOptimize(lieb_thirring_check(b, c, 3.0));
}
BENCHMARK(BM_lieb_thirring);

void BM_norm_p_to_q(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const SuperOp phi{random_eb(d, d, 2, EBClass::general, 9, true)};
  OptimizerConfig cfg;
  cfg.seed = 10;
  for (auto _ : state)
    benchmark::DoNotOptimize(norm_p_to_q(phi, NormQuery(2, 3), cfg).value);
}
BENCHMARK(BM_norm_p_to_q)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_product_norm_test(benchmark::State& state) {
  const SuperOp phi{random_eb(3, 3, 2, EBClass::cond1, 11, true)};
  const SuperOp omega{random_cp_kraus(2, 2, 3, 12, true)};
  OptimizerConfig cfg;
  cfg.seed = 13;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        product_norm_test(phi, omega, NormQuery(2, 3), cfg).ratio);
}
BENCHMARK(BM_product_norm_test)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
