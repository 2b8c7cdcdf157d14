// Serial references against the OpenMP kernels. Run with OMP_NUM_THREADS set
// to compare scaling; the serial variants ignore it.

#include <benchmark/benchmark.h>

#include "tribaker/classical_map.hpp"
#include "tribaker/phase_space.hpp"
#include "tribaker/quantum_map.hpp"
#include "tribaker/scar_basis.hpp"

using namespace tribaker;

namespace {

MapSpec spec_for(int n, double r) {
  MapSpec s;
  s.n_dim = n;
  s.reflectivity = r;
  return s;
}

MeasureRequest measure_request(std::int64_t samples) {
  MeasureRequest req;
  req.grid_side = 243;
  req.samples = static_cast<std::uint64_t>(samples);
  return req;
}

void BM_MeasureSerial(benchmark::State& state) {
  const MeasureRequest req = measure_request(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_measure_serial(spec_for(243, 0.07), req));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MeasureParallel(benchmark::State& state) {
  const MeasureRequest req = measure_request(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_measure(spec_for(243, 0.07), req));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct HusimiFixture {
  HusimiFixture() : grid(64, 243) {
    const ResonanceSet set = exact_resonances(open_propagator(spec_for(243, 0.2)), 60);
    right = set.right.leftCols(60);
    left = set.left.leftCols(60);
  }
  CoherentGrid grid;
  CMatrix right;
  CMatrix left;
};

const HusimiFixture& husimi_fixture() {
  static const HusimiFixture f;
  return f;
}

void BM_HusimiSerial(benchmark::State& state) {
  const auto& f = husimi_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(husimi_diagonal_serial(f.grid, f.right, f.left));
}

void BM_HusimiParallel(benchmark::State& state) {
  const auto& f = husimi_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(husimi_diagonal(f.grid, f.right, f.left));
}

std::vector<PeriodicOrbit> repeller_orbits() {
  std::vector<PeriodicOrbit> out;
  for (const auto& o : enumerate_orbits(7)) {
    if (o.inside_repeller) out.push_back(o);
  }
  return out;
}

void BM_ScarBasisSerial(benchmark::State& state) {
  const CMatrix u = open_propagator(spec_for(243, 0.07));
  const auto orbits = repeller_orbits();
  for (auto _ : state) benchmark::DoNotOptimize(build_scar_basis_serial(orbits, u, 5));
}

void BM_ScarBasisParallel(benchmark::State& state) {
  const CMatrix u = open_propagator(spec_for(243, 0.07));
  const auto orbits = repeller_orbits();
  for (auto _ : state) benchmark::DoNotOptimize(build_scar_basis(orbits, u, 5));
}

}  // namespace

BENCHMARK(BM_MeasureSerial)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeasureParallel)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HusimiSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HusimiParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScarBasisSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScarBasisParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
