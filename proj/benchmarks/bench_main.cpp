#include <benchmark/benchmark.h>

#include "freectl/control.hpp"
#include "freectl/freecalc.hpp"
#include "freectl/ncpoly.hpp"
#include "freectl/randmat.hpp"
#include "freectl/runtime.hpp"
#include "freectl/sde.hpp"

using namespace freectl;

namespace {

ncpoly::NCPolynomial word(int d, std::initializer_list<int> letters) {
  const auto p = ncpoly::NCPolynomial::monomial(d, ncpoly::Word(letters));
  return (p + p.adjoint()) * Complex(0.5, 0.0);
}

MatrixTuple tuple(std::size_t n, std::size_t d) {
  auto s = Stream::derive(1, 0, StreamTag::test_data);
  return randmat::random_hermitian_tuple(n, d, 1.0, s);
}

}  // namespace

static void BM_GueIncrement(benchmark::State& state) {
  auto s = Stream::derive(2, 0, StreamTag::test_data);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(randmat::gue_increment(n, 1e-3, s));
}
BENCHMARK(BM_GueIncrement)->Arg(50)->Arg(100)->Arg(200);

static void BM_FreeDiff(benchmark::State& state) {
  const auto p = word(2, {0, 1, 0, 1, 1, 0, 1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(ncpoly::free_diff(p, 0));
}
BENCHMARK(BM_FreeDiff);

static void BM_FreeLaplacian(benchmark::State& state) {
  const auto u = freecalc::CylinderFunction::trace_of(word(2, {0, 0, 1, 1}) + word(2, {0, 1, 0, 1}));
  const auto x = tuple(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(freecalc::free_laplacian(u, x));
}
BENCHMARK(BM_FreeLaplacian)->Arg(50)->Arg(100);

static void BM_CommonLaplacian(benchmark::State& state) {
  const auto u = freecalc::CylinderFunction::trace_of(word(2, {0, 0, 1, 1}) + word(2, {0, 1, 0, 1}));
  const auto x = tuple(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(freecalc::common_laplacian(u, x));
}
BENCHMARK(BM_CommonLaplacian)->Arg(50)->Arg(100);

static void BM_Riccati(benchmark::State& state) {
  control::LQSpec spec;
  spec.g0 = RealMatrix::Identity(2, 2);
  spec.g1 = RealMatrix::Identity(2, 2) * 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(control::solve_riccati(spec, 1000));
}
BENCHMARK(BM_Riccati);

static void BM_SimulatePath(benchmark::State& state) {
  sde::SimConfig c;
  c.n = static_cast<std::size_t>(state.range(0));
  c.d = 2;
  c.steps = 100;
  c.beta_c = 0.5;
  c.beta_f = 1.0;
  c.snapshot_every = c.steps;
  const auto x0 = tuple(c.n, 2);
  const auto policy = sde::ControlPolicy::feedback([](double, const MatrixTuple& x) { return x * -1.0; });
  std::size_t path = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sde::simulate_path(c, policy, x0, {}, path++));
}
BENCHMARK(BM_SimulatePath)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_DysonPath(benchmark::State& state) {
  sde::SimConfig c;
  c.n = static_cast<std::size_t>(state.range(0));
  c.d = 1;
  c.steps = 200;
  c.beta_f = 1.0;
  c.snapshot_every = c.steps;
  const auto mu = randmat::semicircle_quantile_measure(c.n);
  for (auto _ : state) benchmark::DoNotOptimize(sde::dyson_simulate(c, mu));
}
BENCHMARK(BM_DysonPath)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  tune_allocator();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
