#pragma once

// UAV mobility: distance-linear flight energy, energy-optimal matching of
// UAVs to new cluster centers, trajectory bookkeeping, and replanning after
// some UAVs run out of battery.

#include <cstddef>
#include <span>
#include <vector>

#include "uavmob/clustering.hpp"
#include "uavmob/geometry.hpp"
#include "uavmob/transport.hpp"

namespace uavmob::fleet {

/// Flight energy per meter is the speed polynomial a v^2 + b v + c0 [J/m];
/// the implied propulsion power is v times that.
struct EnergyModel {
  double a = 0.95;
  double b = -20.4;
  double c0 = 130.0;
  double speed = 10.0;           // cruise speed [m/s]
  bool horizontal_only = false;  // ignore altitude changes in travel distance

  double energy_per_meter() const { return a * speed * speed + b * speed + c0; }
  double power() const { return speed * energy_per_meter(); }
  void validate() const;
};

/// Energy [J] to fly `distance` meters at the model's cruise speed.
double move_energy(double distance, const EnergyModel& model);

/// Straight-line travel distance under the model's distance convention.
double travel_distance(const UavPosition& from, const UavPosition& to, const EnergyModel& model);

struct FleetMatch {
  std::vector<std::size_t> target_of_uav;
  std::vector<double> energy;  // per UAV [J]
  double total_energy = 0.0;
  ot::TransportPlan plan;
  ot::TransportProblem problem;
};

/// Energy-minimal one-to-one matching of `current` UAVs onto `targets`.
FleetMatch match_fleet(std::span<const UavPosition> current, std::span<const UavPosition> targets,
                       const EnergyModel& model);

inline constexpr std::size_t kNoTarget = static_cast<std::size_t>(-1);

struct PathPoint {
  std::size_t t = 0;
  UavPosition position;
};

struct FleetState {
  std::vector<UavPosition> positions;
  std::vector<double> energy;            // cumulative [J]
  std::vector<double> last_step_energy;  // energy of the most recent step [J]
  std::vector<std::size_t> last_target;  // target index matched in the most recent step
  std::vector<bool> alive;
  std::vector<std::vector<PathPoint>> paths;
  std::size_t epoch = 0;

  static FleetState start(std::vector<UavPosition> positions);
  std::size_t alive_count() const;
  std::vector<std::size_t> alive_ids() const;
};

/// Flies every alive UAV to its matched target and books the energy.
FleetState step_fleet(const FleetState& state, std::span<const UavPosition> targets, const EnergyModel& model);

enum class LossMode { kAverage, kWorst };

struct LossStats {
  std::size_t q = 0;
  LossMode mode = LossMode::kAverage;
  double mean_energy_per_uav = 0.0;  // averaged (or worst) over depleted subsets [J]
  std::size_t subsets_evaluated = 0;
  bool sampled = false;  // true when C(K, q) exceeded kMaxExhaustiveSubsets
  std::vector<std::size_t> worst_subset;
};

inline constexpr std::size_t kMaxExhaustiveSubsets = 10000;

/// For every q-subset of alive UAVs, re-cluster `devices` onto the survivors
/// (capacities ceil(L / (K - q))) and report the mean flight energy per
/// surviving UAV; the mean over subsets in average mode, the maximum in worst
/// mode. `config` supplies everything except num_uavs and capacities.
LossStats replan_after_loss(const FleetState& state, std::span<const GroundPosition> devices, std::size_t q,
                            LossMode mode, const clustering::ClusteringConfig& config, const EnergyModel& model);

/// Both modes from one pass over the subsets.
std::pair<LossStats, LossStats> replan_after_loss_both(const FleetState& state,
                                                       std::span<const GroundPosition> devices, std::size_t q,
                                                       const clustering::ClusteringConfig& config,
                                                       const EnergyModel& model);

}  // namespace uavmob::fleet
