#include <benchmark/benchmark.h>

#include "kinex/collision.hpp"
#include "kinex/expm_tridiag.hpp"
#include "kinex/harness.hpp"
#include "kinex/integrator.hpp"

using namespace kinex;

namespace {

ProblemSpec bench_spec(CollisionModel model, int nx) {
  ProblemSpec spec;
  spec.model = model;
  spec.nx = nx;
  spec.nv = 150;
  return spec;
}

}  // namespace

static void BM_ExpmAction(benchmark::State& state) {
  const auto vg = build_velocity_grid(15.0, static_cast<int>(state.range(0)));
  const Tridiag q = fp_flux_operator(0.3, 1.2, vg);
  const Profile x = bimodal_profile(vg);
  for (auto _ : state) benchmark::DoNotOptimize(expm_action(q, 0.7, x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExpmAction)->RangeMultiplier(2)->Range(150, 600)->Complexity(benchmark::oN);

static void BM_FpExp(benchmark::State& state) {
  const auto vg = build_velocity_grid(15.0, 150);
  const Profile g = bimodal_profile(vg);
  const double s = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(fp_exp(g, s, vg));
}
// Below, inside and above the fast-path threshold.
BENCHMARK(BM_FpExp)->Arg(1)->Arg(100)->Arg(10000);

static void BM_BgkApply(benchmark::State& state) {
  const auto vg = build_velocity_grid(15.0, 150);
  const BgkSolver solver(vg);
  const Profile g = bimodal_profile(vg);
  Profile out(g.size());
  for (auto _ : state) {
    solver.apply(g, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_BgkApply);

static void BM_WenoRate(benchmark::State& state) {
  const Problem p(bench_spec(CollisionModel::bgk, static_cast<int>(state.range(0))));
  DistributionField r;
  for (auto _ : state) {
    p.transport().rate(p.initial(), r);
    benchmark::DoNotOptimize(r.values().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 150);
}
BENCHMARK(BM_WenoRate)->Arg(80)->Arg(320);

static void BM_Exprk2Step(benchmark::State& state) {
  const auto model = state.range(0) == 0 ? CollisionModel::bgk : CollisionModel::fp;
  const Problem p(bench_spec(model, 80));
  const StepContext ctx = p.context();
  const double dt = p.timestep(1.0 / 24.0);
  for (auto _ : state) benchmark::DoNotOptimize(exprk2_step(p.initial(), dt, ctx));
  state.SetLabel(std::string(to_string(model)));
}
BENCHMARK(BM_Exprk2Step)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
