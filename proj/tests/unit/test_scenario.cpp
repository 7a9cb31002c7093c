#include <doctest.h>

#include <cmath>

#include "uavmob/clustering.hpp"
#include "uavmob/scenario.hpp"

using namespace uavmob;
using namespace uavmob::scenario;

namespace {

ScenarioConfig small(std::uint64_t seed = 3) {
  ScenarioConfig c;
  c.num_devices = 60;
  c.num_uavs = 4;
  c.time_steps = 4;
  c.restarts = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  ScenarioConfig c = small();
  CHECK_NOTHROW(c.validate());
  c.num_devices = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small();
  c.num_uavs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small();
  c.capacities = {1, 1, 1, 1};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(small().resolved_capacities() == std::vector<std::int64_t>(4, 15));
}

TEST_CASE("spawn_devices and mobility") {
  ScenarioConfig c = small();
  c.num_devices = 100000;
  Rng rng(1);
  const auto pts = spawn_devices(c, rng);
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    CHECK((p.x >= 0 && p.x <= c.width && p.y >= 0 && p.y <= c.height));
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  CHECK(std::abs(mx - 600.0) < 6.0);
  CHECK(std::abs(my - 600.0) < 6.0);

  c.num_devices = 1;
  CHECK(spawn_devices(c, rng).size() == 1);

  Rng r2(2);
  CHECK(step_mobility(pts, 0.0, c.width, c.height, r2) == pts);

  std::vector<GroundPosition> centre(100000, GroundPosition{600.0, 600.0});
  const auto moved = step_mobility(centre, 50.0, c.width, c.height, r2);
  double sx = 0, sxx = 0;
  for (const auto& p : moved) {
    sx += p.x - 600.0;
    sxx += (p.x - 600.0) * (p.x - 600.0);
  }
  const double n = static_cast<double>(moved.size());
  const double sd = std::sqrt(sxx / n - (sx / n) * (sx / n));
  CHECK(std::abs(sd - 50.0) < 1.0);

  std::vector<GroundPosition> edge(1000, GroundPosition{1.0, 1199.0});
  for (const auto& p : step_mobility(edge, 500.0, c.width, c.height, r2)) {
    CHECK((p.x >= 0 && p.x <= c.width && p.y >= 0 && p.y <= c.height));
  }
}

TEST_CASE("run_proposed accounting and determinism") {
  const ScenarioConfig c = small();
  const auto recs = run_proposed(c);
  REQUIRE(recs.size() == c.time_steps);
  const auto again = run_proposed(c);
  for (std::size_t t = 0; t < recs.size(); ++t) {
    CHECK(recs[t].total_power == again[t].total_power);
    CHECK(recs[t].step_energy == again[t].step_energy);
    CHECK(recs[t].uav_of_device == again[t].uav_of_device);
  }

  for (const auto& r : recs) {
    std::vector<clustering::Cluster> clusters(r.uavs.size());
    for (std::size_t k = 0; k < r.uavs.size(); ++k) clusters[k].center = r.uavs[k];
    for (std::size_t i = 0; i < r.devices.size(); ++i) clusters[r.uav_of_device[i]].members.push_back(i);
    CHECK(clustering::total_power(r.devices, clusters, c.link, c.channel) ==
          doctest::Approx(r.total_power).epsilon(1e-12));
    for (double e : r.step_energy) CHECK(e >= 0.0);
  }
}

TEST_CASE("run_proposed fixed points") {
  ScenarioConfig c = small();
  c.sigma = 0.0;
  c.time_steps = 5;
  const auto recs = run_proposed(c);
  for (std::size_t t = 1; t < recs.size(); ++t) {
    double e = 0;
    for (double s : recs[t].step_energy) e += s;
    CHECK(e < 21.0 * 1.0);  // under one meter of total travel
  }

  ScenarioConfig one = small();
  one.time_steps = 1;
  CHECK(run_proposed(one).size() == 1);
}

TEST_CASE("initial_uavs override") {
  ScenarioConfig c = small();
  c.initial_uavs = std::vector<UavPosition>{{0, 0, 100}, {1200, 0, 100}, {0, 1200, 100}, {1200, 1200, 100}};
  const auto recs = run_proposed(c);
  double e0 = 0;
  for (double s : recs[0].step_energy) e0 += s;
  CHECK(e0 > 0.0);
  c.initial_uavs->pop_back();
  CHECK_THROWS_AS(run_proposed(c), std::invalid_argument);
}

TEST_CASE("voronoi baseline") {
  ScenarioConfig c = small();
  c.num_uavs = 1;
  c.sigma = 0.0;
  const auto recs = run_voronoi_baseline(c);
  CHECK(recs[0].uavs[0].x == doctest::Approx(600.0).epsilon(5e-3));
  CHECK(recs[0].uavs[0].y == doctest::Approx(600.0).epsilon(5e-3));
  CHECK(recs[0].uavs[0].h == 500.0);
  for (const auto& r : recs) {
    CHECK(r.total_power == recs[0].total_power);
    for (auto u : r.uav_of_device) CHECK(u == 0);
  }

  const auto layout = centroidal_layout(4, 1200, 1200, 500);
  REQUIRE(layout.size() == 4);
  for (const auto& u : layout) {
    CHECK(std::abs(std::abs(u.x - 600.0) - 300.0) < 10.0);
    CHECK(std::abs(std::abs(u.y - 600.0) - 300.0) < 10.0);
  }
  CHECK(centroidal_layout(4, 1200, 1200, 500) == layout);
}

TEST_CASE("sweep_num_uavs") {
  ScenarioConfig c;
  c.seed = 8;
  c.reps = 6;
  const std::vector<std::size_t> ks{4, 6, 8};
  const auto pts = sweep_num_uavs(c, ks, 6);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    CHECK(p.proposed.size() == 6);
    CHECK(p.proposed_mean < p.baseline_mean);
    CHECK(p.proposed_stderr >= 0.0);
    for (std::size_t r = 0; r < p.proposed.size(); ++r) CHECK(p.proposed[r] <= p.baseline[r]);
  }
  CHECK(pts[0].proposed_mean > pts[1].proposed_mean);
  CHECK(pts[1].proposed_mean > pts[2].proposed_mean);

  const auto again = sweep_num_uavs(c, ks, 6);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(again[i].proposed == pts[i].proposed);
  CHECK_THROWS_AS(sweep_num_uavs(c, std::vector<std::size_t>{}, 3), std::invalid_argument);
}

TEST_CASE("deploy") {
  const auto d = deploy(small());
  CHECK(d.devices.size() == 60);
  CHECK(d.uav_of_device.size() == 60);
  CHECK(d.fleet.positions.size() == 4);
}
