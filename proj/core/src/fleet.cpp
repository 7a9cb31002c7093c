#include "uavmob/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "uavmob/random.hpp"

namespace uavmob::fleet {

void EnergyModel::validate() const {
  if (!(speed > 0.0)) throw std::invalid_argument("energy model: speed must be > 0");
  if (!(energy_per_meter() > 0.0)) {
    throw std::invalid_argument("energy model: power must be positive at the cruise speed");
  }
}

double move_energy(double distance, const EnergyModel& model) {
  if (!(distance >= 0.0)) throw std::domain_error("move_energy: distance must be >= 0");
  return distance * model.energy_per_meter();
}

double travel_distance(const UavPosition& from, const UavPosition& to, const EnergyModel& model) {
  if (model.horizontal_only) return ground_distance(from.ground(), to.ground());
  return distance(from, to);
}

FleetMatch match_fleet(std::span<const UavPosition> current, std::span<const UavPosition> targets,
                       const EnergyModel& model) {
  if (current.size() != targets.size()) {
    throw std::invalid_argument(
        fmt::format("match_fleet: {} UAVs cannot be matched to {} targets", current.size(), targets.size()));
  }
  const std::size_t n = current.size();
  FleetMatch match;
  match.problem.costs = Matrix<double>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      match.problem.costs(k, l) = move_energy(travel_distance(current[k], targets[l], model), model);
    }
  }
  match.problem.supplies.assign(n, 1);
  match.problem.demands.assign(n, 1);
  match.plan = ot::solve_transportation(match.problem);

  match.target_of_uav.assign(n, 0);
  match.energy.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      if (match.plan.flow(k, l) == 1) {
        match.target_of_uav[k] = l;
        match.energy[k] = match.problem.costs(k, l);
        match.total_energy += match.energy[k];
      }
    }
  }
  return match;
}

FleetState FleetState::start(std::vector<UavPosition> positions) {
  FleetState s;
  const std::size_t n = positions.size();
  s.energy.assign(n, 0.0);
  s.last_step_energy.assign(n, 0.0);
  s.last_target.assign(n, kNoTarget);
  s.alive.assign(n, true);
  s.paths.resize(n);
  for (std::size_t k = 0; k < n; ++k) s.paths[k].push_back({0, positions[k]});
  s.positions = std::move(positions);
  return s;
}

std::size_t FleetState::alive_count() const { return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), true)); }

std::vector<std::size_t> FleetState::alive_ids() const {
  std::vector<std::size_t> ids;
  for (std::size_t k = 0; k < alive.size(); ++k) {
    if (alive[k]) ids.push_back(k);
  }
  return ids;
}

FleetState step_fleet(const FleetState& state, std::span<const UavPosition> targets, const EnergyModel& model) {
  const std::vector<std::size_t> ids = state.alive_ids();
  std::vector<UavPosition> current;
  current.reserve(ids.size());
  for (std::size_t k : ids) current.push_back(state.positions[k]);
  const FleetMatch match = match_fleet(current, targets, model);

  FleetState next = state;
  next.epoch = state.epoch + 1;
  std::fill(next.last_step_energy.begin(), next.last_step_energy.end(), 0.0);
  std::fill(next.last_target.begin(), next.last_target.end(), kNoTarget);
  for (std::size_t m = 0; m < ids.size(); ++m) {
    const std::size_t k = ids[m];
    next.positions[k] = targets[match.target_of_uav[m]];
    next.last_step_energy[k] = match.energy[m];
    next.last_target[k] = match.target_of_uav[m];
    next.energy[k] += match.energy[m];
    next.paths[k].push_back({next.epoch, next.positions[k]});
  }
  return next;
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Advances `combo` (strictly increasing indices into [0, n)) in lexicographic order.
bool next_combination(std::vector<std::size_t>& combo, std::size_t n) {
  const std::size_t k = combo.size();
  for (std::size_t i = k; i-- > 0;) {
    if (combo[i] < n - k + i) {
      ++combo[i];
      for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::pair<LossStats, LossStats> replan_after_loss_both(const FleetState& state,
                                                       std::span<const GroundPosition> devices, std::size_t q,
                                                       const clustering::ClusteringConfig& config,
                                                       const EnergyModel& model) {
  const std::vector<std::size_t> ids = state.alive_ids();
  const std::size_t alive = ids.size();
  if (q >= alive) {
    throw std::invalid_argument(fmt::format("replan_after_loss: q = {} leaves no operational UAV of {}", q, alive));
  }
  const std::size_t survivors = alive - q;

  // The new deployment depends only on the devices and the survivor count.
  clustering::ClusteringConfig reduced = config;
  reduced.num_uavs = survivors;
  reduced.capacities = clustering::even_capacities(devices.size(), survivors);
  const auto centers = clustering::cluster_devices(devices, reduced).centers();

  auto evaluate = [&](const std::vector<std::size_t>& depleted) {
    std::vector<UavPosition> current;
    current.reserve(survivors);
    std::size_t d = 0;
    for (std::size_t m = 0; m < alive; ++m) {
      if (d < depleted.size() && depleted[d] == m) {
        ++d;
        continue;
      }
      current.push_back(state.positions[ids[m]]);
    }
    return match_fleet(current, centers, model).total_energy / static_cast<double>(survivors);
  };

  LossStats average;
  average.q = q;
  LossStats worst;
  worst.q = q;
  worst.mode = LossMode::kWorst;
  worst.mean_energy_per_uav = -1.0;
  double sum = 0.0;
  std::size_t count = 0;
  auto record = [&](const std::vector<std::size_t>& subset) {
    const double e = evaluate(subset);
    sum += e;
    ++count;
    if (e > worst.mean_energy_per_uav) {
      worst.mean_energy_per_uav = e;
      worst.worst_subset.clear();
      for (std::size_t m : subset) worst.worst_subset.push_back(ids[m]);
    }
  };

  const bool exhaustive = binomial(alive, q) <= static_cast<double>(kMaxExhaustiveSubsets);
  if (exhaustive) {
    std::vector<std::size_t> combo(q);
    for (std::size_t i = 0; i < q; ++i) combo[i] = i;
    do {
      record(combo);
    } while (q > 0 && next_combination(combo, alive));
  } else {
    Rng rng(derive_seed(config.seed, 0x10557ULL + q));
    std::vector<std::size_t> pool(alive);
    for (std::size_t s = 0; s < kMaxExhaustiveSubsets; ++s) {
      for (std::size_t i = 0; i < alive; ++i) pool[i] = i;
      for (std::size_t i = 0; i < q; ++i) std::swap(pool[i], pool[i + rng.below(alive - i)]);
      std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(q));
      std::sort(subset.begin(), subset.end());
      record(subset);
    }
  }

  average.mean_energy_per_uav = sum / static_cast<double>(count);
  average.subsets_evaluated = worst.subsets_evaluated = count;
  average.sampled = worst.sampled = !exhaustive;
  return {average, worst};
}

LossStats replan_after_loss(const FleetState& state, std::span<const GroundPosition> devices, std::size_t q,
                            LossMode mode, const clustering::ClusteringConfig& config, const EnergyModel& model) {
  auto [average, worst] = replan_after_loss_both(state, devices, q, config, model);
  return mode == LossMode::kAverage ? average : worst;
}

}  // namespace uavmob::fleet
