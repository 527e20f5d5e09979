#include "hyrelax/hyrelax.hpp"

#include <benchmark/benchmark.h>

using namespace hyrelax;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec pendulum_state() {
  Vec x(4);
  x << 0.4, 0.1, -2e-6, -0.3;
  return x;
}

DoublePendulumSystemParams elastic() {
  DoublePendulumSystemParams p;
  p.c = 0.5;
  return p;
}

}  // namespace

static void BM_PendulumField(benchmark::State& state) {
  const HybridSystem sys = double_pendulum(elastic());
  const Vec x = pendulum_state();
  for (auto _ : state) benchmark::DoNotOptimize(sys.mode(0).field.eval(x, Vec()));
}
BENCHMARK(BM_PendulumField);

static void BM_RelaxedStripField(benchmark::State& state) {
  const RelaxedSystem rs(double_pendulum(elastic()), {1e-5, {}});
  const Vec x = pendulum_state();
  for (auto _ : state) benchmark::DoNotOptimize(rs.state_field(0, x, Vec()));
}
BENCHMARK(BM_RelaxedStripField);

static void BM_RelaxedStripJacobian(benchmark::State& state) {
  const RelaxedSystem rs(double_pendulum(elastic()), {1e-5, {}});
  const Vec x = pendulum_state();
  for (auto _ : state) benchmark::DoNotOptimize(rs.state_jacobian(0, x, Vec()));
}
BENCHMARK(BM_RelaxedStripJacobian);

static void BM_Rk4Step(benchmark::State& state) {
  const RelaxedSystem rs(double_pendulum(elastic()), {1e-5, {}});
  const Vec x = pendulum_state();
  const StateField f = [&](const Vec& v) { return rs.state_field(0, v, Vec(), false); };
  for (auto _ : state) benchmark::DoNotOptimize(integrator_step(SchemeKind::RK4, f, x, 1e-5));
}
BENCHMARK(BM_Rk4Step);

static void BM_BouncingBallRun(benchmark::State& state) {
  const RelaxedSystem rs(bouncing_ball(), {1e-4, {}});
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const Trajectory tr =
        simulate_discrete(rs, {SchemeKind::RK4, h}, vec2(1, 0), 0, InputSignal::none(), 6.0, {1000, true});
    benchmark::DoNotOptimize(tr.samples.back().x);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(6.0 / h));
}
BENCHMARK(BM_BouncingBallRun)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_QuotientDistance(benchmark::State& state) {
  const RelaxedGeometry geo(bouncing_ball(), 0.1);
  const QuotientMetric metric(geo);
  const HybridPoint p{0, vec2(0.3, -1.0)};
  const HybridPoint q{0, vec2(0.2, 0.7)};
  for (auto _ : state) benchmark::DoNotOptimize(metric.distance(p, q));
}
BENCHMARK(BM_QuotientDistance);

static void BM_EdgeGeometry(benchmark::State& state) {
  const HybridSystem sys = double_pendulum();
  for (auto _ : state) benchmark::DoNotOptimize(build_edge_geometry(sys, 0, 1e-5));
}
BENCHMARK(BM_EdgeGeometry);
BENCHMARK_MAIN();
