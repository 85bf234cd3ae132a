#include <benchmark/benchmark.h>

#include "vela/constitutive.hpp"
#include "vela/dynamics.hpp"
#include "vela/spectral.hpp"

namespace {

void BM_Gradient(benchmark::State& st) {
  const vela::Grid g(static_cast<int>(st.range(0)), 6.283185307179586);
  vela::Spectral sp(g);
  vela::ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.at(0, i) = std::sin(0.01 * static_cast<double>(i));
  for (auto _ : st) benchmark::DoNotOptimize(sp.gradient_all(f));
}
BENCHMARK(BM_Gradient)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
  const vela::Grid g(static_cast<int>(st.range(0)), 6.283185307179586);
  const auto model = vela::make_model("builtin", {});
  vela::InitialDataOptions io;
  io.width = 0.15;  // keeps the det residual small on coarse grids
  const vela::State s0 = vela::generate_initial_data(g, 1, 0.01, *model, io);
  vela::SolverConfig cfg;
  cfg.dt = 0.5 * g.spacing();
  vela::Solver solver(g, *model, cfg);
  for (auto _ : st) benchmark::DoNotOptimize(solver.step(s0));
}
BENCHMARK(BM_Step)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Ahat(benchmark::State& st) {
  const auto model = vela::make_model(st.range(0) ? "oldroyd-b" : "builtin", {});
  vela::Mat3 h = vela::Mat3::identity();
  h(0, 1) = 0.01;
  h(2, 0) = -0.02;
  for (auto _ : st) benchmark::DoNotOptimize(model->ahat(h));
}
BENCHMARK(BM_Ahat)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
