#include <random>

#include <benchmark/benchmark.h>

#include "uavmob/channel.hpp"
#include "uavmob/clustering.hpp"

namespace {

std::vector<uavmob::GroundPosition> devices(std::size_t n, double side, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<uavmob::GroundPosition> out(n);
  for (auto& p : out) p = {u(g), u(g)};
  return out;
}

const double kTheta = uavmob::channel::min_elevation_angle(uavmob::channel::ChannelParams{});

void BM_UpdateCenter(benchmark::State& state) {
  const auto members = devices(static_cast<std::size_t>(state.range(0)), 300.0, 4);
  for (auto _ : state) benchmark::DoNotOptimize(uavmob::clustering::update_center(members, kTheta, 100.0));
}
BENCHMARK(BM_UpdateCenter)->Arg(5)->Arg(20)->Arg(80);

void BM_UpdateCenterDual(benchmark::State& state) {
  const auto members = devices(static_cast<std::size_t>(state.range(0)), 300.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(uavmob::clustering::update_center_dual(members, kTheta).dual_value);
}
BENCHMARK(BM_UpdateCenterDual)->Arg(6)->Arg(20);

void BM_ClusterDevices(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto pts = devices(n, 1200.0, 6);
  uavmob::clustering::ClusteringConfig cfg;
  cfg.num_uavs = k;
  cfg.capacities = uavmob::clustering::even_capacities(n, k);
  cfg.theta_min_deg = kTheta;
  cfg.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(uavmob::clustering::cluster_devices(pts, cfg).trace.size());
}
BENCHMARK(BM_ClusterDevices)->Args({100, 5})->Args({400, 8})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
