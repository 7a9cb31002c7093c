#pragma once

// Time-stepped experiments: device populations with Gaussian random-walk
// mobility, per-epoch re-clustering with energy-optimal fleet moves, the fixed
// centroidal-Voronoi baseline, and the sweep over fleet sizes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavmob/channel.hpp"
#include "uavmob/clustering.hpp"
#include "uavmob/fleet.hpp"
#include "uavmob/geometry.hpp"
#include "uavmob/random.hpp"

namespace uavmob::scenario {

struct ScenarioConfig {
  double width = 1200.0;   // [m]
  double height = 1200.0;  // [m]
  std::size_t num_devices = 100;
  std::size_t num_uavs = 5;
  std::vector<std::int64_t> capacities;  // empty: ceil(L / K) each
  std::size_t time_steps = 10;
  double sigma = 50.0;  // per-coordinate mobility std-dev per epoch [m]

  channel::ChannelParams channel;
  channel::LinkParams link;
  fleet::EnergyModel energy;

  double min_altitude = 100.0;
  double tolerance = 0.1;
  int max_iterations = 100;
  std::size_t restarts = 10;  // seeded clustering runs per cold start
  clustering::Seeding seeding = clustering::Seeding::kKMeansPlusPlus;

  std::uint64_t seed = 0;
  double baseline_altitude = 500.0;
  bool baseline_capacity = false;  // capacity-respecting nearest assignment
  std::size_t reps = 50;

  std::optional<std::vector<UavPosition>> initial_uavs;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::vector<std::int64_t> resolved_capacities() const;
  double theta_min_deg() const;
  clustering::ClusteringConfig clustering_config(std::uint64_t clustering_seed) const;
};

struct StepRecord {
  std::size_t t = 0;
  std::vector<GroundPosition> devices;
  std::vector<std::size_t> uav_of_device;  // serving UAV id per device
  std::vector<UavPosition> uavs;           // by UAV id
  double total_power = 0.0;                // [W]
  std::vector<double> step_energy;         // per UAV id [J]
};

/// A run that failed at `epoch`; `partial` holds the completed epochs.
class EpochFailure : public std::runtime_error {
 public:
  EpochFailure(const std::string& what, std::size_t epoch, std::vector<StepRecord> partial)
      : std::runtime_error(what), epoch_(epoch), partial_(std::move(partial)) {}
  std::size_t epoch() const noexcept { return epoch_; }
  const std::vector<StepRecord>& partial() const noexcept { return partial_; }

 private:
  std::size_t epoch_;
  std::vector<StepRecord> partial_;
};

std::vector<GroundPosition> spawn_devices(const ScenarioConfig& config, Rng& rng);

/// Adds N(0, sigma^2) to each coordinate, then clamps into [0, width] x [0, height].
std::vector<GroundPosition> step_mobility(std::span<const GroundPosition> positions, double sigma,
                                          double width, double height, Rng& rng);

/// Epoch 0 clusters the spawned devices; every later epoch first moves the
/// devices. Each epoch's clustering warm-starts from the current UAV
/// positions and the fleet then flies the energy-optimal matching onto the
/// new centers.
std::vector<StepRecord> run_proposed(const ScenarioConfig& config);

/// UAVs fixed at a centroidal Voronoi layout at baseline_altitude; each device
/// served by the nearest UAV.
std::vector<StepRecord> run_voronoi_baseline(const ScenarioConfig& config);

/// Centroidal Voronoi layout of the rectangle: Lloyd iterations over 1e5
/// uniform samples drawn from a fixed seed. Memoized per (K, width, height).
std::vector<UavPosition> centroidal_layout(std::size_t num_uavs, double width, double height, double altitude);

struct SweepPoint {
  std::size_t num_uavs = 0;
  double proposed_mean = 0.0;  // [W]
  double proposed_stderr = 0.0;
  double baseline_mean = 0.0;
  double baseline_stderr = 0.0;
  std::vector<double> proposed;  // per repetition [W]
  std::vector<double> baseline;
};

/// Static-snapshot comparison of both methods for each K with capacities
/// ceil(L / K). Repetition r uses the same device snapshot for every K and
/// both methods.
std::vector<SweepPoint> sweep_num_uavs(const ScenarioConfig& config, std::span<const std::size_t> k_values,
                                       std::size_t reps);

/// Optimal deployment for the config's devices and K, as used by the UAV-loss
/// experiment: returns the spawned devices and the converged fleet.
struct Deployment {
  std::vector<GroundPosition> devices;
  std::vector<std::size_t> uav_of_device;
  fleet::FleetState fleet;
  std::uint64_t clustering_seed = 0;
};
Deployment deploy(const ScenarioConfig& config);

}  // namespace uavmob::scenario
