#pragma once

// Experiment drivers behind the `uavmob` subcommands. Each writes CSV files
// plus `manifest.txt` into an output directory; CSV bytes depend only on the
// configuration (wall-clock time appears only in the manifest).
//
//   cluster   clusters.csv  device_id,x,y,cluster_id
//             uavs.csv      uav_id,x,y,h
//   sweep     sweep.csv     K,method,mean_power_mW,stderr_mW
//   simulate  trajectory.csv t,uav_id,x,y,h,step_energy_J
//             power.csv     t,total_power_mW
//   uav-loss  uav_loss.csv  q,mode,mean_energy_per_uav_J

#include <cstddef>
#include <filesystem>
#include <vector>

#include "uavmob/scenario.hpp"

namespace uavmob::commands {

struct CommandOutput {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

CommandOutput cmd_cluster(const scenario::ScenarioConfig& config, const std::filesystem::path& out_dir);

CommandOutput cmd_sweep(const scenario::ScenarioConfig& config, std::size_t k_min, std::size_t k_max,
                        std::size_t reps, const std::filesystem::path& out_dir);

/// On an epoch failure the completed epochs are still written before the
/// scenario::EpochFailure is rethrown.
CommandOutput cmd_simulate(const scenario::ScenarioConfig& config, const std::filesystem::path& out_dir);

/// q runs over 0..q_max; throws std::invalid_argument when q_max >= K.
CommandOutput cmd_uav_loss(const scenario::ScenarioConfig& config, std::size_t q_max,
                           const std::filesystem::path& out_dir);

}  // namespace uavmob::commands
