#include <benchmark/benchmark.h>

#include "relaxstab/dichotomy.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/resolvent.hpp"
#include "relaxstab/symmetrizer.hpp"
#include "relaxstab/systems.hpp"
#include "relaxstab/timedomain.hpp"

using namespace relaxstab;

namespace {

const WaveProfile& front() {
  static const WaveProfile p = solve_profile_jinxin(2.0, 1.0, 0.0);
  return p;
}

ResolventField front_field(cplx lambda) { return assemble_G(jin_xin(2.0), front(), FrequencyPoint{Vec(), lambda}); }

void BM_ProfileShooting(benchmark::State& state) {
  const auto sys = jin_xin(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_profile_shooting(sys, front().w_minus, front().w_plus, 0.5));
}
BENCHMARK(BM_ProfileShooting)->Unit(benchmark::kMillisecond);

void BM_ResolventSolve(benchmark::State& state) {
  const auto field = front_field(cplx(0.05, static_cast<double>(state.range(0))));
  const ResolventSolver solver(field);
  GridFunction f(field.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = CVec::Constant(2, std::exp(-field.grid[i] * field.grid[i]));
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f));
}
BENCHMARK(BM_ResolventSolve)->Arg(3)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_ResolventFactor(benchmark::State& state) {
  const auto field = front_field(cplx(0.05, 3.0));
  for (auto _ : state) benchmark::DoNotOptimize(ResolventSolver(field));
}
BENCHMARK(BM_ResolventFactor)->Unit(benchmark::kMillisecond);

void BM_Dichotomy(benchmark::State& state) {
  const auto field = front_field(cplx(0.05, 3.0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate_subspaces(field));
}
BENCHMARK(BM_Dichotomy)->Unit(benchmark::kMillisecond);

void BM_LyapunovSymmetrizer(benchmark::State& state) {
  const auto field = front_field(cplx(2.0, 0.0));
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_symmetrizer(field));
}
BENCHMARK(BM_LyapunovSymmetrizer)->Unit(benchmark::kMillisecond);

void BM_SimulatorStep(benchmark::State& state) {
  SimConfig cfg;
  cfg.nodes = static_cast<std::size_t>(state.range(0));
  const Simulator sim(jin_xin(2.0), front(), cfg);
  Vec dir(2);
  dir << 1.0, 0.5;
  auto s = sim.initial_state(gaussian_data(dir, 1e-2));
  const double dt = sim.stable_dt();
  for (auto _ : state) sim.step(s, dt);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatorStep)->Arg(401)->Arg(1601);

}  // namespace
BENCHMARK_MAIN();
