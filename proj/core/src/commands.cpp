#include "uavmob/commands.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "uavmob/clustering.hpp"
#include "uavmob/config.hpp"
#include "uavmob/fleet.hpp"
#include "uavmob/version.hpp"

namespace uavmob::commands {
namespace {

namespace fs = std::filesystem;
using scenario::ScenarioConfig;

constexpr double kMilli = 1e3;

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << contents;
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

fs::path write_manifest(const fs::path& out_dir, const ScenarioConfig& config, std::string_view command,
                        const std::vector<fs::path>& files, Metadata extra) {
  const auto now = std::chrono::system_clock::now();
  std::string text = "# uavmob run manifest\n";
  text += fmt::format("# tool_version = {}\n", kVersion);
  text += fmt::format("# command = {}\n", command);
  text += fmt::format("# master_seed = {}\n", config.seed);
  text += fmt::format("# wall_clock_utc = {:%Y-%m-%dT%H:%M:%SZ}\n",
                      std::chrono::time_point_cast<std::chrono::seconds>(now));
  for (const auto& f : files) text += fmt::format("# output = {}\n", f.filename().string());
  text += fmt::format("# energy_per_meter_J = {}\n", config.energy.energy_per_meter());
  text += fmt::format("# theta_min_deg = {}\n", config.theta_min_deg());
  for (const auto& [k, v] : extra) text += fmt::format("# {} = {}\n", k, v);
  text += config::format_config(config);
  const fs::path path = out_dir / "manifest.txt";
  write_file(path, text);
  return path;
}

}  // namespace

CommandOutput cmd_cluster(const ScenarioConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const scenario::Deployment deployment = scenario::deploy(config);
  const auto& devices = deployment.devices;

  const auto& centers = deployment.fleet.positions;
  const auto& membership = deployment.uav_of_device;

  std::string clusters = "device_id,x,y,cluster_id\n";
  for (std::size_t i = 0; i < devices.size(); ++i) {
    clusters += fmt::format("{},{},{},{}\n", i, devices[i].x, devices[i].y, membership[i]);
  }
  std::string uavs = "uav_id,x,y,h\n";
  for (std::size_t j = 0; j < centers.size(); ++j) {
    uavs += fmt::format("{},{},{},{}\n", j, centers[j].x, centers[j].y, centers[j].h);
  }

  std::vector<clustering::Cluster> grouped(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j) grouped[j].center = centers[j];
  for (std::size_t i = 0; i < devices.size(); ++i) grouped[membership[i]].members.push_back(i);
  const double power = clustering::total_power(devices, grouped, config.link, config.channel);

  CommandOutput out;
  out.files = {out_dir / "clusters.csv", out_dir / "uavs.csv"};
  write_file(out.files[0], clusters);
  write_file(out.files[1], uavs);
  out.manifest = write_manifest(out_dir, config, "cluster", out.files,
                                {{"total_power_mW", fmt::format("{}", power * kMilli)}});
  return out;
}

CommandOutput cmd_sweep(const ScenarioConfig& config, std::size_t k_min, std::size_t k_max, std::size_t reps,
                        const fs::path& out_dir) {
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("sweep: need 1 <= k_min <= k_max");
  fs::create_directories(out_dir);
  std::vector<std::size_t> ks;
  for (std::size_t k = k_min; k <= k_max; ++k) ks.push_back(k);
  const auto points = scenario::sweep_num_uavs(config, ks, reps);

  std::string csv = "K,method,mean_power_mW,stderr_mW\n";
  for (const auto& p : points) {
    csv += fmt::format("{},proposed,{},{}\n", p.num_uavs, p.proposed_mean * kMilli, p.proposed_stderr * kMilli);
    csv += fmt::format("{},voronoi,{},{}\n", p.num_uavs, p.baseline_mean * kMilli, p.baseline_stderr * kMilli);
  }
  CommandOutput out;
  out.files = {out_dir / "sweep.csv"};
  write_file(out.files[0], csv);
  ScenarioConfig snapshot = config;
  snapshot.reps = reps;
  out.manifest = write_manifest(out_dir, snapshot, "sweep", out.files,
                                {{"k_min", std::to_string(k_min)}, {"k_max", std::to_string(k_max)}});
  return out;
}

CommandOutput cmd_simulate(const ScenarioConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<scenario::StepRecord> records;
  std::optional<scenario::EpochFailure> failure;
  try {
    records = scenario::run_proposed(config);
  } catch (const scenario::EpochFailure& e) {
    records = e.partial();
    failure = e;
  }

  std::string trajectory = "t,uav_id,x,y,h,step_energy_J\n";
  std::string power = "t,total_power_mW\n";
  double total_energy = 0.0;
  for (const auto& rec : records) {
    for (std::size_t k = 0; k < rec.uavs.size(); ++k) {
      const auto& p = rec.uavs[k];
      trajectory += fmt::format("{},{},{},{},{},{}\n", rec.t, k, p.x, p.y, p.h, rec.step_energy[k]);
      total_energy += rec.step_energy[k];
    }
    power += fmt::format("{},{}\n", rec.t, rec.total_power * kMilli);
  }

  CommandOutput out;
  out.files = {out_dir / "trajectory.csv", out_dir / "power.csv"};
  write_file(out.files[0], trajectory);
  write_file(out.files[1], power);
  Metadata meta = {{"total_energy_J", fmt::format("{}", total_energy)},
                   {"epochs_completed", std::to_string(records.size())}};
  if (failure) meta.emplace_back("failed_epoch", std::to_string(failure->epoch()));
  out.manifest = write_manifest(out_dir, config, "simulate", out.files, std::move(meta));
  if (failure) throw *failure;
  return out;
}

CommandOutput cmd_uav_loss(const ScenarioConfig& config, std::size_t q_max, const fs::path& out_dir) {
  if (q_max >= config.num_uavs) {
    throw std::invalid_argument(
        fmt::format("uav-loss: q_max = {} must be below the fleet size {}", q_max, config.num_uavs));
  }
  fs::create_directories(out_dir);
  const scenario::Deployment deployment = scenario::deploy(config);
  const auto reclustering = config.clustering_config(deployment.clustering_seed);

  std::string csv = "q,mode,mean_energy_per_uav_J\n";
  for (std::size_t q = 0; q <= q_max; ++q) {
    const auto [average, worst] =
        fleet::replan_after_loss_both(deployment.fleet, deployment.devices, q, reclustering, config.energy);
    csv += fmt::format("{},average,{}\n", q, average.mean_energy_per_uav);
    csv += fmt::format("{},worst,{}\n", q, worst.mean_energy_per_uav);
  }
  CommandOutput out;
  out.files = {out_dir / "uav_loss.csv"};
  write_file(out.files[0], csv);
  out.manifest = write_manifest(out_dir, config, "uav-loss", out.files, {{"q_max", std::to_string(q_max)}});
  return out;
}

}  // namespace uavmob::commands
