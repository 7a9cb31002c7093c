#include <random>

#include <benchmark/benchmark.h>

#include "uavmob/transport.hpp"

namespace {

uavmob::ot::TransportProblem random_problem(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  uavmob::Matrix<double> costs(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) costs(i, j) = u(g);
  return {costs, std::vector<std::int64_t>(n, 1), std::vector<std::int64_t>(n, 1)};
}

void BM_AssignmentSquare(benchmark::State& state) {
  const auto problem = random_problem(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(uavmob::ot::solve_transportation(problem).objective);
}
BENCHMARK(BM_AssignmentSquare)->RangeMultiplier(2)->Range(4, 64);

void BM_SemiAssignment(benchmark::State& state) {
  const auto devices = static_cast<std::size_t>(state.range(0));
  const std::size_t uavs = 8;
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0.0, 1e6);
  uavmob::Matrix<double> costs(devices, uavs);
  for (std::size_t i = 0; i < devices; ++i)
    for (std::size_t j = 0; j < uavs; ++j) costs(i, j) = u(g);
  const std::vector<std::int64_t> caps(uavs, static_cast<std::int64_t>((devices + uavs - 1) / uavs));
  const uavmob::Matrix<char> forbidden(devices, uavs, 0);
  for (auto _ : state) benchmark::DoNotOptimize(uavmob::ot::solve_semi_assignment(costs, caps, forbidden).cost);
}
BENCHMARK(BM_SemiAssignment)->Arg(100)->Arg(400);

void BM_VerifyCertificate(benchmark::State& state) {
  const auto problem = random_problem(32, 3);
  const auto plan = uavmob::ot::solve_transportation(problem);
  for (auto _ : state) benchmark::DoNotOptimize(uavmob::ot::verify_certificate(plan, problem).ok());
}
BENCHMARK(BM_VerifyCertificate);

}  // namespace

BENCHMARK_MAIN();
