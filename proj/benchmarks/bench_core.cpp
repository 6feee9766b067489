#include <benchmark/benchmark.h>

#include "orthocurv/curvature.hpp"
#include "orthocurv/geodesic.hpp"
#include "orthocurv/sde.hpp"

// Hot-path benchmarks: jet-mode expression evaluation, pointwise curvature,
// geodesic integration, and the radial-diffusion path loop.

namespace oc = orthocurv;

namespace {

void BM_JetEval(benchmark::State& state) {
  const oc::dsl::Expression e = oc::dsl::Expression::parse(
      "exp(0.3*sin(x1 + 2*x2)) / (1 + x3^2) + sqrt(1 + x4^2) * log(2 + x1*x4)");
  const double x[4] = {0.3, -0.2, 0.5, 0.1};
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(x, 4, order));
}
BENCHMARK(BM_JetEval)->Arg(1)->Arg(2)->Arg(3);

void BM_CurvatureCp2(benchmark::State& state) {
  const oc::ManifoldSpec spec = oc::catalog_entry("cp2");
  const double x[4] = {0.2, -0.1, 0.15, 0.05};
  for (auto _ : state) benchmark::DoNotOptimize(oc::curvature_at(spec, x));
}
BENCHMARK(BM_CurvatureCp2);

void BM_GeodesicCp2(benchmark::State& state) {
  const oc::ManifoldSpec spec = oc::catalog_entry("cp2");
  const oc::Vec p = oc::Vec::Zero(4);
  oc::Vec v(4);
  v << 1.0, 0.0, 0.0, 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(oc::exp_map(spec, p, v, 0.5));
}
BENCHMARK(BM_GeodesicCp2);

void BM_RhoPaths(benchmark::State& state) {
  oc::DiffusionConfig dc;
  dc.model.kind = oc::StructureKind::Kahler;
  dc.model.k = 1.0;
  dc.model.m = 4.0;
  dc.model.n = 2;
  dc.rho0 = 0.5;
  dc.T = 0.01;
  dc.dt = 1e-4;
  dc.paths = 64;
  dc.seed = 9;
  for (auto _ : state) benchmark::DoNotOptimize(oc::simulate_rho(dc));
  state.SetItemsProcessed(state.iterations() * dc.paths *
                          static_cast<long long>(dc.T / dc.dt));
}
BENCHMARK(BM_RhoPaths);

}  // namespace

BENCHMARK_MAIN();
