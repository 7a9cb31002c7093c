#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uavmob/commands.hpp"
#include "uavmob/config.hpp"

using namespace uavmob;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

scenario::ScenarioConfig base() {
  scenario::ScenarioConfig c;
  c.seed = 5;
  c.num_devices = 50;
  c.num_uavs = 3;
  c.time_steps = 3;
  c.restarts = 2;
  return c;
}

}  // namespace

TEST_CASE("cluster") {
  TempDir dir("uavmob_cmd_cluster");
  auto c = base();
  const auto out = commands::cmd_cluster(c, dir.path);
  const auto devices = read_csv(dir.path / "clusters.csv");
  const auto uavs = read_csv(dir.path / "uavs.csv");
  CHECK(devices[0] == std::vector<std::string>{"device_id", "x", "y", "cluster_id"});
  CHECK(uavs[0] == std::vector<std::string>{"uav_id", "x", "y", "h"});
  CHECK(devices.size() - 1 + uavs.size() - 1 == c.num_devices + c.num_uavs);
  const auto meta = config::read_manifest_metadata(out.manifest);
  CHECK(meta.at("energy_per_meter_J") == "21");

  const std::string first = slurp(dir.path / "clusters.csv");
  commands::cmd_cluster(c, dir.path);
  CHECK(slurp(dir.path / "clusters.csv") == first);

  c.num_uavs = 1;
  commands::cmd_cluster(c, dir.path);
  const auto single = read_csv(dir.path / "clusters.csv");
  for (std::size_t i = 1; i < single.size(); ++i) CHECK(single[i][3] == "0");
}

TEST_CASE("sweep") {
  TempDir dir("uavmob_cmd_sweep");
  commands::cmd_sweep(base(), 2, 4, 3, dir.path);
  const auto rows = read_csv(dir.path / "sweep.csv");
  CHECK(rows[0] == std::vector<std::string>{"K", "method", "mean_power_mW", "stderr_mW"});
  CHECK(rows.size() - 1 == 2 * 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][2]);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK_THROWS_AS(commands::cmd_sweep(base(), 4, 2, 3, dir.path), std::invalid_argument);
}

TEST_CASE("simulate") {
  TempDir dir("uavmob_cmd_sim");
  const auto c = base();
  const auto out = commands::cmd_simulate(c, dir.path);
  const auto traj = read_csv(dir.path / "trajectory.csv");
  const auto power = read_csv(dir.path / "power.csv");
  CHECK(traj[0] == std::vector<std::string>{"t", "uav_id", "x", "y", "h", "step_energy_J"});
  CHECK(power[0] == std::vector<std::string>{"t", "total_power_mW"});
  CHECK(traj.size() - 1 == c.time_steps * c.num_uavs);
  CHECK(power.size() - 1 == c.time_steps);
  double sum = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) sum += std::stod(traj[i][5]);
  const double total = std::stod(config::read_manifest_metadata(out.manifest).at("total_energy_J"));
  CHECK(sum == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("uav-loss") {
  TempDir dir("uavmob_cmd_loss");
  const auto c = base();
  commands::cmd_uav_loss(c, 2, dir.path);
  const auto rows = read_csv(dir.path / "uav_loss.csv");
  CHECK(rows[0] == std::vector<std::string>{"q", "mode", "mean_energy_per_uav_J"});
  CHECK(rows.size() - 1 == 6);
  for (std::size_t i = 1; i < rows.size(); i += 2) {
    CHECK(rows[i][1] == "average");
    CHECK(rows[i + 1][1] == "worst");
    CHECK(std::stod(rows[i][2]) <= std::stod(rows[i + 1][2]));
  }
  CHECK(std::stod(rows[1][2]) == 0.0);
  CHECK_THROWS_AS(commands::cmd_uav_loss(c, 3, dir.path), std::invalid_argument);
}

TEST_CASE("manifest reproduces the run") {
  TempDir dir("uavmob_cmd_manifest");
  auto c = base();
  c.sigma = 17.25;
  const auto out = commands::cmd_simulate(c, dir.path / "a");
  const auto parsed = config::parse_config(out.manifest);
  CHECK(parsed.has_seed);
  commands::cmd_simulate(parsed.scenario, dir.path / "b");
  CHECK(slurp(dir.path / "a" / "trajectory.csv") == slurp(dir.path / "b" / "trajectory.csv"));
  CHECK(slurp(dir.path / "a" / "power.csv") == slurp(dir.path / "b" / "power.csv"));
}
