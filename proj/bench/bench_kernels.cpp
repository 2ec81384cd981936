// Serial reference vs OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include <memory>

#include "mrl/cell_solver.hpp"
#include "mrl/pipeline.hpp"

using namespace mrl;

namespace {

FluidParams params() { return FluidParams{0.25, 1.0, 2.0, 1.0, {1, 0}}; }

const CoefficientField& field() {
  static CoefficientField f(RoughnessProfile::cosine(1.0, {0.3, 0.15}), params());
  return f;
}

CoefficientEvaluator evaluator() {
  return [](double z1, double z2) { return field()(z1, z2); };
}

void bench_sample_field(benchmark::State& state, ExecPolicy policy) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto samples = sample_field(field(), n, policy);
    benchmark::DoNotOptimize(samples.data());
  }
}

void bench_cell_solve(benchmark::State& state, ExecPolicy policy) {
  const int n = static_cast<int>(state.range(0));
  const auto eval = evaluator();
  for (auto _ : state) {
    CellSolution cell = solve_correctors(eval, params(), n, policy);
    benchmark::DoNotOptimize(cell.q1.data());
  }
}

void bench_flow_factors(benchmark::State& state, ExecPolicy policy) {
  const int n = static_cast<int>(state.range(0));
  const auto eval = evaluator();
  const CellSolution cell = solve_correctors(eval, params(), n, policy);
  for (auto _ : state) {
    FlowFactors f = flow_factors(cell, eval, params(), policy);
    benchmark::DoNotOptimize(&f);
  }
}

void bench_oracle_sweep(benchmark::State& state, ExecPolicy policy) {
  for (auto _ : state) {
    auto pts = oracle_sweep(params(), 256, Phi2Variant::A2, policy);
    benchmark::DoNotOptimize(pts.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_sample_field, serial, ExecPolicy::Serial)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bench_sample_field, openmp, ExecPolicy::Parallel)->Arg(256)->Arg(512);
BENCHMARK_CAPTURE(bench_cell_solve, serial, ExecPolicy::Serial)->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(bench_cell_solve, openmp, ExecPolicy::Parallel)->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(bench_flow_factors, serial, ExecPolicy::Serial)->Arg(128);
BENCHMARK_CAPTURE(bench_flow_factors, openmp, ExecPolicy::Parallel)->Arg(128);
BENCHMARK_CAPTURE(bench_oracle_sweep, serial, ExecPolicy::Serial);
BENCHMARK_CAPTURE(bench_oracle_sweep, openmp, ExecPolicy::Parallel);

BENCHMARK_MAIN();
