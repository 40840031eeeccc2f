// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "pauliprop/error_analysis.hpp"
#include "pauliprop/topology.hpp"

using namespace pauliprop;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_BackPropagateStaircase(benchmark::State& state) {
  const auto spec = haar_su4_ensemble(build_staircase_2d(6, 6, 2));
  const auto c = sample_circuit(spec, 1);
  const auto o = PauliSum::from_pauli(PauliString::single(36, 0, Pauli::Z));
  TruncationPolicy p;
  p.weight_k = static_cast<std::size_t>(state.range(1));
  std::size_t peak = 0;
  for (auto _ : state) {
    auto r = back_propagate(o, c, p, exec_of(state));
    peak = r.stats.peak_terms;
    benchmark::DoNotOptimize(r);
  }
  state.counters["peak_terms"] = static_cast<double>(peak);
  label(state);
}
BENCHMARK(BM_BackPropagateStaircase)->ArgsProduct({{0, 1}, {2, 3}})->Unit(benchmark::kMillisecond);

void BM_BackPropagateBrickwork(benchmark::State& state) {
  const auto spec = haar_su4_ensemble(build_brickwork_1d(24, 10));
  const auto c = sample_circuit(spec, 2);
  PauliSum o(24);
  for (std::size_t q = 0; q < 24; q += 4) o.add(PauliString::single(24, q, Pauli::Z), 1.0);
  TruncationPolicy p;
  p.weight_k = 3;
  for (auto _ : state) benchmark::DoNotOptimize(back_propagate(o, c, p, exec_of(state)));
  label(state);
}
BENCHMARK(BM_BackPropagateBrickwork)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PathSampler(benchmark::State& state) {
  const auto spec = haar_su4_ensemble(build_staircase_2d(4, 4, 3));
  const auto o = PauliSum::from_pauli(PauliString::single(16, 0, Pauli::Z));
  const auto rho = ProductState::zero_state(16);
  const std::vector<std::size_t> ks = {1, 2, 3};
  for (auto _ : state) benchmark::DoNotOptimize(mc_mse_estimate(spec, o, rho, ks, 20000, 7, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * 20000);
  label(state);
}
BENCHMARK(BM_PathSampler)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
