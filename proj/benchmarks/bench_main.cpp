#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "winband/band_asymptotics.hpp"
#include "winband/basis_rotation.hpp"
#include "winband/cell_solver.hpp"
#include "winband/floquet_solver.hpp"

namespace {

using namespace winband;

CellEigenData random_data(int k) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  CellEigenData data;
  for (int j = 0; j < k; ++j) {
    data.traces.push_back(TraceData{cplx(g(rng), g(rng)), cplx(g(rng), g(rng)),
                                    cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
  }
  return data;
}

PotentialSpec asymmetric() {
  return PotentialSpec{"separable-cosine", {{"amplitude", 3.0},
                                            {"phase", 1.0},
                                            {"modulation", 0.5},
                                            {"wavenumber", 2.0 * std::numbers::pi}}};
}

void BM_RotateBasis(benchmark::State& state) {
  const auto data = random_data(static_cast<int>(state.range(0)));
  double theta = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotate_basis(data, theta));
    theta += 0.01;
  }
}
BENCHMARK(BM_RotateBasis)->Arg(2)->Arg(4)->Arg(6);

void BM_SampleBands(benchmark::State& state) {
  const auto data = random_data(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_bands(data, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SampleBands)->Arg(256)->Arg(1024);

void BM_BandIntervals(benchmark::State& state) {
  const auto coeffs = sample_bands(random_data(3), 1024);
  for (auto _ : state) benchmark::DoNotOptimize(band_intervals(coeffs));
}
BENCHMARK(BM_BandIntervals);

void BM_NeumannSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto op = assemble_neumann(CellSpec{TensorGrid::uniform(n, n, 1.0), asymmetric()});
  for (auto _ : state) benchmark::DoNotOptimize(solve_lowest(op, 6));
}
BENCHMARK(BM_NeumannSolve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_WindowedSolve(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const CellSpec cell{TensorGrid::window_graded(1.0, eps, 8), asymmetric()};
  const auto op = assemble_windowed(WindowedSpec{cell, eps, std::numbers::pi / 2.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigen_near(op, eps, std::numbers::pi / 2.0, -0.26, 1));
  }
}
BENCHMARK(BM_WindowedSolve)->Arg(12)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
