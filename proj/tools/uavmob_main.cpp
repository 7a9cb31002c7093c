// uavmob: batch driver for the clustering, sweep, trajectory and UAV-loss
// experiments. See README.md for the CSV schemas.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "uavmob/commands.hpp"
#include "uavmob/config.hpp"
#include "uavmob/errors.hpp"
#include "uavmob/version.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", c.seed, "master seed; overrides the config");
  cmd->add_option("--reps", c.reps, "Monte Carlo repetitions; overrides the config");
}

uavmob::scenario::ScenarioConfig load(const Common& c) {
  uavmob::config::ParsedConfig parsed;
  if (!c.config_path.empty()) parsed = uavmob::config::parse_config(c.config_path);
  if (c.seed) {
    parsed.scenario.seed = *c.seed;
    parsed.has_seed = true;
  }
  if (!parsed.has_seed) throw CLI::ValidationError("--seed", "a seed is required (config key `seed` or --seed)");
  if (c.reps) parsed.scenario.reps = *c.reps;
  return parsed.scenario;
}

void report(const uavmob::commands::CommandOutput& out) {
  for (const auto& f : out.files) fmt::print("wrote {}\n", f.string());
  fmt::print("wrote {}\n", out.manifest.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV data-collection experiments", "uavmob"};
  app.set_version_flag("--version", std::string(uavmob::kVersion));
  app.require_subcommand(1);

  Common common;
  std::size_t k_min = 4;
  std::size_t k_max = 8;
  std::size_t q_max = 0;

  auto* cluster = app.add_subcommand("cluster", "one static clustering snapshot");
  add_common(cluster, common);
  auto* sweep = app.add_subcommand("sweep", "mean total power vs. number of UAVs, proposed and Voronoi");
  add_common(sweep, common);
  sweep->add_option("--k-min", k_min, "smallest fleet size")->check(CLI::PositiveNumber);
  sweep->add_option("--k-max", k_max, "largest fleet size")->check(CLI::PositiveNumber);
  auto* simulate = app.add_subcommand("simulate", "per-epoch trajectories, energy and power");
  add_common(simulate, common);
  auto* loss = app.add_subcommand("uav-loss", "energy per UAV after losing q UAVs");
  add_common(loss, common);
  loss->add_option("--q-max", q_max, "largest number of lost UAVs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto config = load(common);
    const std::filesystem::path out = common.out_dir;
    if (cluster->parsed()) {
      report(uavmob::commands::cmd_cluster(config, out));
    } else if (sweep->parsed()) {
      report(uavmob::commands::cmd_sweep(config, k_min, k_max, config.reps, out));
    } else if (simulate->parsed()) {
      report(uavmob::commands::cmd_simulate(config, out));
    } else if (loss->parsed()) {
      report(uavmob::commands::cmd_uav_loss(config, q_max, out));
    }
  } catch (const CLI::ValidationError& e) {
    fmt::print(stderr, "uavmob: {}\n", e.what());
    return 2;
  } catch (const uavmob::config::ConfigError& e) {
    if (e.line() > 0) {
      fmt::print(stderr, "uavmob: {}:{}: {}\n", common.config_path, e.line(), e.what());
    } else {
      fmt::print(stderr, "uavmob: {}: {}\n", common.config_path, e.what());
    }
    return 2;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "uavmob: {}\n", e.what());
    return 2;
  } catch (const uavmob::InfeasibleError& e) {
    fmt::print(stderr, "uavmob: infeasible: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "uavmob: {}\n", e.what());
    return 1;
  }
  return 0;
}
