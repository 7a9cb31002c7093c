#pragma once

// Capacity- and LoS-radius-constrained K-means over ground devices. Each
// iteration assigns devices to UAVs by an exact capacitated transport solve and
// then re-places every UAV at the altitude-aware center of its cluster.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uavmob/channel.hpp"
#include "uavmob/geometry.hpp"

namespace uavmob::clustering {

enum class Seeding {
  kKMeansPlusPlus,  // D^2-weighted farthest-point sampling over devices
};

struct ClusteringConfig {
  std::size_t num_uavs = 1;
  std::vector<std::int64_t> capacities;  // M_j, one per UAV
  double theta_min_deg = 45.0;
  double min_altitude = 100.0;  // h_min [m]
  double tolerance = 0.1;       // max center displacement at convergence [m]
  int max_iterations = 100;
  Seeding seeding = Seeding::kKMeansPlusPlus;
  std::uint64_t seed = 0;
  /// Independent seeded runs when no warm start is given; the lowest final
  /// objective wins. Restart r > 0 seeds with derive_seed(seed, r).
  std::size_t restarts = 1;

  /// Throws std::invalid_argument if the config cannot serve `num_devices`.
  void validate(std::size_t num_devices) const;
};

/// Capacities ceil(L / K) for each of K UAVs.
std::vector<std::int64_t> even_capacities(std::size_t num_devices, std::size_t num_uavs);

struct Cluster {
  std::vector<std::size_t> members;
  UavPosition center;
};

struct Assignment {
  std::vector<std::size_t> uav_of_device;
  double objective = 0.0;  // sum of squared slant distances
};

/// True when `device` sees `uav` at elevation >= theta_min (relative slack 1e-9).
bool within_los_radius(const GroundPosition& device, const UavPosition& uav, double theta_min_deg);

/// Capacity-respecting assignment minimizing total squared slant distance with
/// out-of-radius arcs removed. Throws InfeasibleError naming the devices that
/// cannot be served.
Assignment assign_devices(std::span<const GroundPosition> devices, std::span<const UavPosition> centers,
                          const ClusteringConfig& config);

/// sum_i (ground distance_i^2 + h^2): the update-step objective of one cluster.
double center_objective(std::span<const GroundPosition> members, const UavPosition& center);

/// Optimal UAV placement for a fixed cluster: minimizes center_objective
/// subject to every member seeing the UAV at elevation >= theta_min_deg, with
/// altitude at least h_min.
///
/// The altitude constraint binds at the optimum, h = max(h_min, tan(theta) *
/// max_i ground_dist_i), which leaves a strictly convex problem in (x, y). Its
/// minimizer is pinned by at most three farthest members (or by the h_min
/// clamp), so the active sets over convex-hull vertices are enumerated in
/// closed form. Large hulls fall back to nested golden-section search.
UavPosition update_center(std::span<const GroundPosition> members, double theta_min_deg, double h_min);

/// Data of the center-update problem written as a QCQP in s = (x, y, h):
/// minimize 1/2 s'P_o s + Q_o's + r_o  s.t. 1/2 s'P_i s + Q_i's + r_i <= 0.
struct QcqpData {
  using Mat3 = std::array<std::array<double, 3>, 3>;
  using Vec3 = std::array<double, 3>;

  Mat3 P_o{};
  Mat3 P_i{};  // shared by every member constraint
  Vec3 Q_o{};
  std::vector<Vec3> Q_i;
  double r_o = 0.0;
  std::vector<double> r_i;
  double omega = 0.0;  // 1 - 1/sin^2(theta_min)

  double objective(const Vec3& s) const;
  double constraint(std::size_t i, const Vec3& s) const;
};

QcqpData build_qcqp(std::span<const GroundPosition> members, double theta_min_deg);

enum class DualStatus {
  kInterior,  // P(lambda) positive definite at the maximizer
  kBoundary,  // maximizer sits where P(lambda) turns singular in h
};

struct DualOptions {
  int max_iterations = 200000;
  double step_tolerance = 1e-13;
};

struct DualCenterResult {
  UavPosition center;     // s* = -P^-1 Q when interior, else update_center's result
  UavPosition recovered;  // (x, y) from the dual's xy-block, h from the tight constraint
  std::vector<double> lambda;
  double dual_value = 0.0;
  DualStatus status = DualStatus::kInterior;
  bool converged = false;
  int iterations = 0;
};

/// Lagrange-dual cross-check of update_center (with h_min = 0): projected
/// accelerated gradient ascent of g(lambda) = -1/2 Q'P^-1 Q + r over
/// lambda >= 0 restricted to P(lambda) positive semidefinite.
DualCenterResult update_center_dual(std::span<const GroundPosition> members, double theta_min_deg,
                                    const DualOptions& options = {});

struct IterationRecord {
  double assignment_objective = 0.0;  // after the assignment step
  double update_objective = 0.0;      // after the center update step
  double max_displacement = 0.0;      // largest UAV move in the update step [m]
  bool altitudes_raised = false;      // infeasibility fallback fired
};

struct ClusteringResult {
  std::vector<Cluster> clusters;
  std::vector<std::size_t> uav_of_device;
  std::vector<IterationRecord> trace;
  bool converged = false;

  std::vector<UavPosition> centers() const;
  /// Per-iteration objective (sum of squared distances after each update).
  std::vector<double> objectives() const;
};

/// Seed UAV positions at altitude h_min according to config.seeding.
std::vector<UavPosition> seed_centers(std::span<const GroundPosition> devices, const ClusteringConfig& config);

/// Alternates assignment and center updates until the largest center move is
/// below config.tolerance, the assignment repeats, or max_iterations is hit.
/// `initial_centers` overrides seeding (warm start) and disables restarts.
///
/// When a device is out of every UAV's LoS radius (or capacity strands it),
/// the nearest UAV that cannot reach it is raised just enough to do so and the
/// assignment is retried; persistent infeasibility throws InfeasibleError.
ClusteringResult cluster_devices(std::span<const GroundPosition> devices, const ClusteringConfig& config,
                                 std::optional<std::vector<UavPosition>> initial_centers = std::nullopt);

/// Sum of minimum device transmit powers [W] to their cluster's UAV.
double total_power(std::span<const GroundPosition> devices, std::span<const Cluster> clusters,
                   const channel::LinkParams& link, const channel::ChannelParams& ch);

}  // namespace uavmob::clustering
