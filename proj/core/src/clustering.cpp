#include "uavmob/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "uavmob/errors.hpp"
#include "uavmob/matrix.hpp"
#include "uavmob/random.hpp"
#include "uavmob/transport.hpp"

namespace uavmob::clustering {

void ClusteringConfig::validate(std::size_t num_devices) const {
  if (num_uavs < 1) throw std::invalid_argument("clustering: num_uavs must be >= 1");
  if (capacities.size() != num_uavs) {
    throw std::invalid_argument(
        fmt::format("clustering: {} capacities given for {} UAVs", capacities.size(), num_uavs));
  }
  std::int64_t total = 0;
  for (auto c : capacities) {
    if (c < 0) throw std::invalid_argument("clustering: capacities must be >= 0");
    total += c;
  }
  if (total < static_cast<std::int64_t>(num_devices)) {
    throw std::invalid_argument(
        fmt::format("clustering: total capacity {} cannot serve {} devices", total, num_devices));
  }
  if (!(theta_min_deg > 0.0 && theta_min_deg < 90.0)) {
    throw std::invalid_argument("clustering: theta_min_deg must lie in (0, 90)");
  }
  if (!(min_altitude >= 0.0)) throw std::invalid_argument("clustering: min_altitude must be >= 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("clustering: tolerance must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("clustering: max_iterations must be >= 1");
  if (restarts < 1) throw std::invalid_argument("clustering: restarts must be >= 1");
}

std::vector<std::int64_t> even_capacities(std::size_t num_devices, std::size_t num_uavs) {
  if (num_uavs == 0) throw std::invalid_argument("even_capacities: num_uavs must be >= 1");
  const auto per_uav = static_cast<std::int64_t>((num_devices + num_uavs - 1) / num_uavs);
  return std::vector<std::int64_t>(num_uavs, per_uav);
}

std::vector<UavPosition> ClusteringResult::centers() const {
  std::vector<UavPosition> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.center);
  return out;
}

std::vector<double> ClusteringResult::objectives() const {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) out.push_back(r.update_objective);
  return out;
}

bool within_los_radius(const GroundPosition& device, const UavPosition& uav, double theta_min_deg) {
  const double radius = channel::max_los_radius(uav.h, theta_min_deg);
  return slant_distance_sq(device, uav) <= radius * radius * (1.0 + 1e-9);
}

Assignment assign_devices(std::span<const GroundPosition> devices, std::span<const UavPosition> centers,
                          const ClusteringConfig& config) {
  if (centers.empty()) throw std::invalid_argument("assign_devices: no UAVs");
  if (config.capacities.size() != centers.size()) {
    throw std::invalid_argument("assign_devices: one capacity per UAV required");
  }
  const std::size_t n = devices.size();
  const std::size_t k = centers.size();
  Matrix<double> costs(n, k);
  Matrix<char> forbidden(n, k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      costs(i, j) = slant_distance_sq(devices[i], centers[j]);
      forbidden(i, j) = within_los_radius(devices[i], centers[j], config.theta_min_deg) ? 0 : 1;
    }
  }

  ot::SemiAssignment solved;
  try {
    solved = ot::solve_semi_assignment(costs, config.capacities, forbidden);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(fmt::format("assign_devices: devices [{}] cannot be served by any UAV within "
                                      "LoS radius and capacity",
                                      fmt::join(e.indices(), ", ")),
                          e.indices());
  }
  return {std::move(solved.column_of_row), solved.cost};
}

std::vector<UavPosition> seed_centers(std::span<const GroundPosition> devices, const ClusteringConfig& config) {
  if (devices.empty()) throw std::invalid_argument("seed_centers: no devices");
  Rng rng(config.seed);
  std::vector<UavPosition> centers;
  centers.reserve(config.num_uavs);
  std::vector<double> nearest(devices.size(), std::numeric_limits<double>::infinity());

  std::size_t pick = rng.below(devices.size());
  for (std::size_t c = 0; c < config.num_uavs; ++c) {
    if (c > 0) {
      const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
      if (total > 0.0) {
        double target = rng.uniform() * total;
        pick = devices.size() - 1;
        for (std::size_t i = 0; i < devices.size(); ++i) {
          target -= nearest[i];
          if (target < 0.0 && nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.below(devices.size());
      }
    }
    centers.push_back({devices[pick].x, devices[pick].y, config.min_altitude});
    for (std::size_t i = 0; i < devices.size(); ++i) {
      nearest[i] = std::min(nearest[i], ground_distance_sq(devices[i], devices[pick]));
    }
  }
  return centers;
}

namespace {

// Assignment with the altitude-relaxation fallback: each stranded device lifts
// the nearest UAV that cannot yet reach it to the lowest altitude that does.
// Every round adds at least one reachable (device, UAV) pair, so the loop
// ends once all pairs are reachable at the latest.
Assignment assign_with_fallback(std::span<const GroundPosition> devices, std::vector<UavPosition>& centers,
                                const ClusteringConfig& config, bool& raised) {
  const double tan_theta = std::tan(deg_to_rad(config.theta_min_deg));
  for (;;) {
    try {
      return assign_devices(devices, centers, config);
    } catch (const InfeasibleError& e) {
      bool progress = false;
      for (std::size_t d : e.indices()) {
        std::size_t best = centers.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < centers.size(); ++j) {
          if (within_los_radius(devices[d], centers[j], config.theta_min_deg)) continue;
          const double dist = ground_distance(devices[d], centers[j].ground());
          if (dist < best_dist) {
            best_dist = dist;
            best = j;
          }
        }
        if (best == centers.size()) continue;
        centers[best].h = std::max(centers[best].h, best_dist * tan_theta);
        progress = true;
      }
      if (!progress) throw;
      raised = true;
    }
  }
}

ClusteringResult cluster_from(std::span<const GroundPosition> devices, const ClusteringConfig& config,
                              std::vector<UavPosition> centers) {
  ClusteringResult result;
  std::vector<std::size_t> previous_assignment;
  std::vector<std::vector<GroundPosition>> members(config.num_uavs);
  std::vector<std::vector<std::size_t>> member_ids(config.num_uavs);

  for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
    IterationRecord record;
    const Assignment assignment = assign_with_fallback(devices, centers, config, record.altitudes_raised);
    record.assignment_objective = assignment.objective;

    for (auto& m : members) m.clear();
    for (auto& m : member_ids) m.clear();
    for (std::size_t i = 0; i < devices.size(); ++i) {
      members[assignment.uav_of_device[i]].push_back(devices[i]);
      member_ids[assignment.uav_of_device[i]].push_back(i);
    }

    double update_objective = 0.0;
    for (std::size_t j = 0; j < config.num_uavs; ++j) {
      if (members[j].empty()) continue;  // an idle UAV holds position
      const UavPosition updated = update_center(members[j], config.theta_min_deg, config.min_altitude);
      // The current position is feasible for these members; never trade it
      // for a numerically worse one.
      const double old_value = center_objective(members[j], centers[j]);
      const double new_value = center_objective(members[j], updated);
      const UavPosition chosen = new_value < old_value ? updated : centers[j];
      record.max_displacement = std::max(record.max_displacement, distance(chosen, centers[j]));
      update_objective += std::min(new_value, old_value);
      centers[j] = chosen;
    }
    record.update_objective = update_objective;
    result.trace.push_back(record);

    const bool unchanged = assignment.uav_of_device == previous_assignment;
    previous_assignment = assignment.uav_of_device;
    if (unchanged || record.max_displacement < config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.uav_of_device = previous_assignment;
  result.clusters.resize(config.num_uavs);
  for (std::size_t j = 0; j < config.num_uavs; ++j) {
    result.clusters[j].members = member_ids[j];
    result.clusters[j].center = centers[j];
  }
  return result;
}

double final_objective(const ClusteringResult& r) { return r.trace.empty() ? 0.0 : r.trace.back().update_objective; }

}  // namespace

ClusteringResult cluster_devices(std::span<const GroundPosition> devices, const ClusteringConfig& config,
                                 std::optional<std::vector<UavPosition>> initial_centers) {
  config.validate(devices.size());
  if (devices.empty()) throw std::invalid_argument("cluster_devices: no devices");

  if (initial_centers) {
    if (initial_centers->size() != config.num_uavs) {
      throw std::invalid_argument("cluster_devices: initial centers do not match num_uavs");
    }
    return cluster_from(devices, config, std::move(*initial_centers));
  }

  ClusteringResult best = cluster_from(devices, config, seed_centers(devices, config));
  for (std::size_t r = 1; r < config.restarts; ++r) {
    ClusteringConfig restart = config;
    restart.seed = derive_seed(config.seed, r);
    ClusteringResult candidate = cluster_from(devices, restart, seed_centers(devices, restart));
    if (final_objective(candidate) < final_objective(best)) best = std::move(candidate);
  }
  return best;
}

double total_power(std::span<const GroundPosition> devices, std::span<const Cluster> clusters,
                   const channel::LinkParams& link, const channel::ChannelParams& ch) {
  double sum = 0.0;
  for (const auto& cluster : clusters) {
    for (std::size_t i : cluster.members) {
      const double d = slant_distance(devices[i], cluster.center);
      if (d > 0.0) sum += channel::min_transmit_power(d, link, ch);
    }
  }
  return sum;
}

}  // namespace uavmob::clustering
