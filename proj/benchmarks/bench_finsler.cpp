#include "finsler/finsleroid.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/sampling.hpp"
#include "finsler/spray.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace finsler;

struct Fixture {
  BackgroundSpace space = make_normal_space(3, 0.4, 0.3);
  Charge charge = Charge::from_g(0.8);
  Vector x = Vector::Constant(3, 0.1);
  Vector y = (Vector(3) << 0.5, -0.4, 0.8).finished();
};

void BM_MetricClosedForm(benchmark::State& state) {
  Fixture f;
  const Frame fr = frame_at(f.space, f.x, f.y);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_metric(f.charge, fr));
}
BENCHMARK(BM_MetricClosedForm);

// Hessian of K^2 in y, by forward jets and by Richardson central differences.
void BM_DeriveY(benchmark::State& state) {
  Fixture f;
  const Site site = site_at(f.space, f.x);
  const ScalarField k2 = k_squared_field(f.charge, site);
  const DiffConfig cfg = state.range(0) == 0 ? DiffConfig{} : DiffConfig::central_fd();
  const std::span<const double> y(f.y.data(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(derive_y(k2, f.x, y, static_cast<int>(state.range(1)), cfg));
  state.SetLabel(std::string(to_string(cfg.method)) + " order " + std::to_string(state.range(1)));
}
BENCHMARK(BM_DeriveY)->ArgsProduct({{0, 1}, {2, 3}});

void BM_SprayClosed(benchmark::State& state) {
  Fixture f;
  const Frame fr = frame_at(f.space, f.x, f.y);
  const Connection conn = connection_at(f.space, f.x);
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_spray_closed(f.charge, fr, conn));
}
BENCHMARK(BM_SprayClosed);

void BM_SprayNumeric(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_spray_numeric(f.charge, f.space, f.x, f.y));
}
BENCHMARK(BM_SprayNumeric);

void BM_CascadeClosed(benchmark::State& state) {
  const BackgroundSpace space = make_exponential_warped_space(static_cast<int>(state.range(0)), 0.5);
  Rng rng(1);
  const Site site = site_at(space, sample_point(rng, space.dim(), -0.5, 0.5));
  const Frame fr = frame_at(site, sample_velocity(rng, site).y);
  const Connection conn = connection_at(space, site.x);
  for (auto _ : state) benchmark::DoNotOptimize(cascade_closed(-0.4, fr, conn));
}
BENCHMARK(BM_CascadeClosed)->Arg(2)->Arg(3)->Arg(4);

void BM_GeodesicUnitTime(benchmark::State& state) {
  const BackgroundSpace space = make_exponential_warped_space(3, 0.5);
  const Charge ch = Charge::from_g(1.0);
  const SprayFunction spray = geodesic_spray_function(space, ch);
  const Vector x0 = Vector::Zero(3);
  const Vector y0 = (Vector(3) << 0.6, -0.5, 0.4).finished();
  for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(spray, x0, y0, 1.0, 1e-2));
}
BENCHMARK(BM_GeodesicUnitTime)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
