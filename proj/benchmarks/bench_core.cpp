#include <benchmark/benchmark.h>

#include "wgstark/discretize.hpp"
#include "wgstark/distortion.hpp"
#include "wgstark/fields.hpp"
#include "wgstark/geometry.hpp"
#include "wgstark/spectra.hpp"

using namespace wgstark;

namespace {

const WaveguideSetup kSetup{GeometrySetup{}, FieldConfig{0.02, 0.3}};

DistortionParams params() {
  DistortionParams p;
  p.reference_energy = -0.04;
  p.window = 0.01;
  p.beta = 0.004;
  return p;
}

Grid grid(benchmark::State& state) { return Grid::with_spacing(20.0, 0.05, static_cast<int>(state.range(0)), 1.0); }

}  // namespace

static void BM_DistortedCoefficients(benchmark::State& state) {
  const StarkField field(kSetup.geometry, kSetup.field, 21.0);
  const DistortionParams p = params();
  double s = -20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(distorted_coefficients(field, p, s, 0.5));
    s = s > 20.0 ? -20.0 : s + 0.01;
  }
}
BENCHMARK(BM_DistortedCoefficients);

static void BM_CoefficientTable(benchmark::State& state) {
  const Grid g = grid(state);
  for (auto _ : state) benchmark::DoNotOptimize(CoefficientTable(kSetup, params(), g));
  state.counters["n"] = static_cast<double>(g.size());
}
BENCHMARK(BM_CoefficientTable)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& state) {
  const Grid g = grid(state);
  const CoefficientTable table(kSetup, params(), g);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(OperatorKind::DistortedStark, table));
  state.counters["n"] = static_cast<double>(g.size());
}
BENCHMARK(BM_Assemble)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_ShiftInvert(benchmark::State& state) {
  const Grid g = grid(state);
  const auto op = assemble(OperatorKind::DistortedStark, kSetup, params(), g);
  SolverOptions opts;
  opts.method = SolverOptions::Method::ShiftInvert;
  opts.k = 6;
  const Complex target(discrete_threshold(g) - 0.04, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(complex_eigs_near(op, target, opts));
  state.counters["n"] = static_cast<double>(g.size());
}
BENCHMARK(BM_ShiftInvert)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_BoundStates(benchmark::State& state) {
  const Grid g = grid(state);
  const auto op = assemble(OperatorKind::Waveguide, kSetup, std::nullopt, g);
  const double l0 = discrete_threshold(g);
  for (auto _ : state) benchmark::DoNotOptimize(bound_states(op, l0, 2));
  state.counters["n"] = static_cast<double>(g.size());
}
BENCHMARK(BM_BoundStates)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
