#include "uavmob/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "uavmob/errors.hpp"

namespace uavmob::scenario {
namespace {

// Stream identifiers for derive_seed; fixed so results depend only on the seed.
constexpr std::uint64_t kDeviceStream = 1;
constexpr std::uint64_t kClusterStream = 2;
constexpr std::uint64_t kRepStream = 1000;
constexpr std::uint64_t kLayoutSeed = 0x5eedc0ffeeULL;
constexpr std::size_t kLayoutSamples = 100000;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Runs body(i) for i in [0, n) on up to hardware_concurrency workers. Results
// go to caller-owned slots, so scheduling never affects the outcome.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    }));
  }
  for (auto& t : tasks) t.get();
}

std::vector<std::size_t> nearest_uav(std::span<const GroundPosition> devices, std::span<const UavPosition> uavs) {
  std::vector<std::size_t> out(devices.size());
  for (std::size_t i = 0; i < devices.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < uavs.size(); ++j) {
      const double d = slant_distance_sq(devices[i], uavs[j]);
      if (d < best) {
        best = d;
        out[i] = j;
      }
    }
  }
  return out;
}

double power_of(std::span<const GroundPosition> devices, std::span<const std::size_t> uav_of_device,
                std::span<const UavPosition> uavs, const ScenarioConfig& config) {
  double sum = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const double d = slant_distance(devices[i], uavs[uav_of_device[i]]);
    if (d > 0.0) sum += channel::min_transmit_power(d, config.link, config.channel);
  }
  return sum;
}

std::vector<std::size_t> baseline_assignment(std::span<const GroundPosition> devices,
                                             std::span<const UavPosition> uavs, const ScenarioConfig& config,
                                             const std::vector<std::int64_t>& capacities) {
  if (!config.baseline_capacity) return nearest_uav(devices, uavs);
  Matrix<double> costs(devices.size(), uavs.size());
  for (std::size_t i = 0; i < devices.size(); ++i) {
    for (std::size_t j = 0; j < uavs.size(); ++j) costs(i, j) = slant_distance_sq(devices[i], uavs[j]);
  }
  Matrix<char> forbidden(devices.size(), uavs.size(), 0);
  return ot::solve_semi_assignment(costs, capacities, forbidden).column_of_row;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

void ScenarioConfig::validate() const {
  require(width > 0.0 && std::isfinite(width), "width must be > 0");
  require(height > 0.0 && std::isfinite(height), "height must be > 0");
  require(num_devices >= 1, "num_devices must be >= 1");
  require(num_uavs >= 1, "num_uavs must be >= 1");
  require(time_steps >= 1, "time_steps must be >= 1");
  require(sigma >= 0.0, "sigma must be >= 0");
  require(baseline_altitude > 0.0, "baseline_altitude must be > 0");
  require(reps >= 1, "reps must be >= 1");
  channel.validate();
  link.validate();
  energy.validate();
  if (!capacities.empty()) {
    require(capacities.size() == num_uavs, "capacities must list one value per UAV");
  }
  if (initial_uavs) {
    require(initial_uavs->size() == num_uavs, "initial_uavs must list one position per UAV");
  }
  clustering_config(seed).validate(num_devices);
}

std::vector<std::int64_t> ScenarioConfig::resolved_capacities() const {
  if (!capacities.empty()) return capacities;
  return clustering::even_capacities(num_devices, num_uavs);
}

double ScenarioConfig::theta_min_deg() const { return channel::min_elevation_angle(channel); }

clustering::ClusteringConfig ScenarioConfig::clustering_config(std::uint64_t clustering_seed) const {
  clustering::ClusteringConfig c;
  c.num_uavs = num_uavs;
  c.capacities = resolved_capacities();
  c.theta_min_deg = theta_min_deg();
  c.min_altitude = min_altitude;
  c.tolerance = tolerance;
  c.max_iterations = max_iterations;
  c.restarts = restarts;
  c.seeding = seeding;
  c.seed = clustering_seed;
  return c;
}

std::vector<GroundPosition> spawn_devices(const ScenarioConfig& config, Rng& rng) {
  std::vector<GroundPosition> out(config.num_devices);
  for (auto& p : out) {
    p.x = rng.uniform(0.0, config.width);
    p.y = rng.uniform(0.0, config.height);
  }
  return out;
}

std::vector<GroundPosition> step_mobility(std::span<const GroundPosition> positions, double sigma,
                                          double width, double height, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("step_mobility: sigma must be >= 0");
  std::vector<GroundPosition> out(positions.begin(), positions.end());
  if (sigma == 0.0) return out;
  for (auto& p : out) {
    p.x = std::clamp(p.x + sigma * rng.normal(), 0.0, width);
    p.y = std::clamp(p.y + sigma * rng.normal(), 0.0, height);
  }
  return out;
}

std::vector<StepRecord> run_proposed(const ScenarioConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, kDeviceStream));
  std::vector<GroundPosition> devices = spawn_devices(config, rng);
  const auto ccfg = config.clustering_config(derive_seed(config.seed, kClusterStream));

  fleet::FleetState state =
      fleet::FleetState::start(config.initial_uavs ? *config.initial_uavs : clustering::seed_centers(devices, ccfg));

  std::vector<StepRecord> records;
  for (std::size_t t = 0; t < config.time_steps; ++t) {
    if (t > 0) devices = step_mobility(devices, config.sigma, config.width, config.height, rng);
    try {
      const auto result = clustering::cluster_devices(devices, ccfg, state.positions);
      const auto centers = result.centers();
      state = fleet::step_fleet(state, centers, config.energy);

      StepRecord rec;
      rec.t = t;
      rec.devices = devices;
      rec.uavs = state.positions;
      rec.step_energy = state.last_step_energy;
      std::vector<std::size_t> uav_of_cluster(centers.size());
      for (std::size_t k = 0; k < state.last_target.size(); ++k) uav_of_cluster[state.last_target[k]] = k;
      rec.uav_of_device.resize(devices.size());
      for (std::size_t i = 0; i < devices.size(); ++i) rec.uav_of_device[i] = uav_of_cluster[result.uav_of_device[i]];
      rec.total_power = clustering::total_power(devices, result.clusters, config.link, config.channel);
      records.push_back(std::move(rec));
    } catch (const InfeasibleError& e) {
      throw EpochFailure(fmt::format("epoch {}: {}", t, e.what()), t, std::move(records));
    }
  }
  return records;
}

std::vector<UavPosition> centroidal_layout(std::size_t num_uavs, double width, double height, double altitude) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, double, double>, std::vector<GroundPosition>> cache;

  std::vector<GroundPosition> generators;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({num_uavs, width, height});
    if (it != cache.end()) generators = it->second;
  }
  if (generators.empty()) {
    Rng rng(kLayoutSeed);
    std::vector<GroundPosition> samples(kLayoutSamples);
    for (auto& s : samples) s = {rng.uniform(0.0, width), rng.uniform(0.0, height)};
    generators.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(num_uavs));

    std::vector<double> sx(num_uavs);
    std::vector<double> sy(num_uavs);
    std::vector<std::size_t> count(num_uavs);
    for (int iteration = 0; iteration < 500; ++iteration) {
      std::fill(sx.begin(), sx.end(), 0.0);
      std::fill(sy.begin(), sy.end(), 0.0);
      std::fill(count.begin(), count.end(), 0);
      for (const auto& s : samples) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < num_uavs; ++j) {
          const double d = ground_distance_sq(s, generators[j]);
          if (d < best_d) {
            best_d = d;
            best = j;
          }
        }
        sx[best] += s.x;
        sy[best] += s.y;
        ++count[best];
      }
      double moved = 0.0;
      for (std::size_t j = 0; j < num_uavs; ++j) {
        if (count[j] == 0) continue;
        const GroundPosition next{sx[j] / static_cast<double>(count[j]), sy[j] / static_cast<double>(count[j])};
        moved = std::max(moved, ground_distance(next, generators[j]));
        generators[j] = next;
      }
      if (moved < 1e-3) break;
    }
    std::lock_guard lock(mutex);
    cache.emplace(std::make_tuple(num_uavs, width, height), generators);
  }

  std::vector<UavPosition> out;
  out.reserve(num_uavs);
  for (const auto& g : generators) out.push_back({g.x, g.y, altitude});
  return out;
}

std::vector<StepRecord> run_voronoi_baseline(const ScenarioConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, kDeviceStream));
  std::vector<GroundPosition> devices = spawn_devices(config, rng);
  const auto uavs = centroidal_layout(config.num_uavs, config.width, config.height, config.baseline_altitude);
  const auto capacities = config.resolved_capacities();

  std::vector<StepRecord> records;
  for (std::size_t t = 0; t < config.time_steps; ++t) {
    if (t > 0) devices = step_mobility(devices, config.sigma, config.width, config.height, rng);
    StepRecord rec;
    rec.t = t;
    rec.devices = devices;
    rec.uavs = uavs;
    rec.uav_of_device = baseline_assignment(devices, uavs, config, capacities);
    rec.total_power = power_of(devices, rec.uav_of_device, uavs, config);
    rec.step_energy.assign(uavs.size(), 0.0);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SweepPoint> sweep_num_uavs(const ScenarioConfig& config, std::span<const std::size_t> k_values,
                                       std::size_t reps) {
  if (k_values.empty()) throw std::invalid_argument("sweep_num_uavs: empty K range");
  if (reps < 1) throw std::invalid_argument("sweep_num_uavs: reps must be >= 1");

  std::vector<SweepPoint> points;
  for (std::size_t k : k_values) {
    ScenarioConfig cfg = config;
    cfg.num_uavs = k;
    cfg.capacities.clear();
    cfg.initial_uavs.reset();
    cfg.validate();
    const auto capacities = cfg.resolved_capacities();
    const auto layout = centroidal_layout(k, cfg.width, cfg.height, cfg.baseline_altitude);

    SweepPoint point;
    point.num_uavs = k;
    point.proposed.assign(reps, 0.0);
    point.baseline.assign(reps, 0.0);
    parallel_for(reps, [&](std::size_t r) {
      const std::uint64_t rep_seed = derive_seed(config.seed, kRepStream + r);
      Rng rng(derive_seed(rep_seed, kDeviceStream));
      const auto devices = spawn_devices(cfg, rng);
      const auto result = clustering::cluster_devices(devices, cfg.clustering_config(derive_seed(rep_seed, k)));
      point.proposed[r] = clustering::total_power(devices, result.clusters, cfg.link, cfg.channel);
      const auto assignment = baseline_assignment(devices, layout, cfg, capacities);
      point.baseline[r] = power_of(devices, assignment, layout, cfg);
    });
    std::tie(point.proposed_mean, point.proposed_stderr) = mean_and_stderr(point.proposed);
    std::tie(point.baseline_mean, point.baseline_stderr) = mean_and_stderr(point.baseline);
    points.push_back(std::move(point));
  }
  return points;
}

Deployment deploy(const ScenarioConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, kDeviceStream));
  Deployment d;
  d.devices = spawn_devices(config, rng);
  d.clustering_seed = derive_seed(config.seed, kClusterStream);
  const auto result = clustering::cluster_devices(d.devices, config.clustering_config(d.clustering_seed));
  d.uav_of_device = result.uav_of_device;
  d.fleet = fleet::FleetState::start(result.centers());
  return d;
}

}  // namespace uavmob::scenario
