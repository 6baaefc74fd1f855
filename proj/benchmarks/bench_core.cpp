#include <benchmark/benchmark.h>

#include <vector>

#include "hnodal/ensemble.hpp"
#include "hnodal/hermite.hpp"
#include "hnodal/kacrice.hpp"
#include "hnodal/nodal_mc.hpp"
#include "hnodal/projector.hpp"

using namespace hnodal;

namespace {

Vec point(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

void BM_HermiteValues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> v(n + 1), dv(n + 1);
  for (auto _ : state) {
    hermite_values(3.7, v, dv);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_HermiteValues)->Arg(20)->Arg(80)->Arg(320);

void BM_KernelJetExact(benchmark::State& state) {
  const ModelParams p(2, 1.0, static_cast<int>(state.range(0)));
  const MultiIndexSet idx = enumerate_level(2, p.level());
  const Vec x = point(0.6, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_jet_exact(p, idx, x).pi);
}
BENCHMARK(BM_KernelJetExact)->Arg(20)->Arg(80);

void BM_KernelMehler(benchmark::State& state) {
  const ModelParams p(2, 1.0, static_cast<int>(state.range(0)));
  const Vec x = point(0.6, 0.3), y = point(-0.2, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_mehler_quadrature(p, x, y).value);
}
BENCHMARK(BM_KernelMehler)->Arg(20)->Arg(40);

void BM_KernelMehlerBinary128(benchmark::State& state) {
  const ModelParams p(2, 1.0, 40);
  const Vec x = point(0.6, 0.3), y = point(-0.2, 0.9);
  MehlerQuadratureSpec spec = MehlerQuadratureSpec::defaults(p, x, y);
  spec.arithmetic = Arithmetic::binary128;
  for (auto _ : state) benchmark::DoNotOptimize(kernel_mehler_quadrature(p, x, y, spec).value);
}
BENCHMARK(BM_KernelMehlerBinary128);

void BM_Density(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const ModelParams p(d, 1.0, 40);
  const MultiIndexSet idx = enumerate_level(d, p.level());
  Vec x = Vec::Constant(d, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(density(p, idx, x));
}
BENCHMARK(BM_Density)->Arg(2)->Arg(3);

void BM_MonteCarloBall(benchmark::State& state) {
  const ModelParams p(2, 1.0, 20);
  const Ball ball(point(0.8, 0.0), 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_expected_measure(p, ball, static_cast<int>(state.range(0)), 7).mean);
}
BENCHMARK(BM_MonteCarloBall)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
