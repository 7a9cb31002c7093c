#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "uavmob/channel.hpp"
#include "uavmob/clustering.hpp"
#include "uavmob/errors.hpp"

using namespace uavmob;
using namespace uavmob::clustering;

namespace {

const double kTheta = channel::min_elevation_angle(channel::ChannelParams{});

std::vector<GroundPosition> uniform_points(std::size_t n, double side, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<GroundPosition> out(n);
  for (auto& p : out) p = {u(g), u(g)};
  return out;
}

ClusteringConfig make_config(std::size_t k, std::vector<std::int64_t> caps, std::uint64_t seed = 1) {
  ClusteringConfig c;
  c.num_uavs = k;
  c.capacities = std::move(caps);
  c.theta_min_deg = kTheta;
  c.seed = seed;
  return c;
}

double elevation_deg(const GroundPosition& d, const UavPosition& u) {
  const double g = ground_distance(d, u.ground());
  return rad_to_deg(std::atan2(u.h, g));
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(make_config(2, {3, 3}).validate(6));
  CHECK_THROWS_AS(make_config(2, {3, 3}).validate(7), std::invalid_argument);
  CHECK_THROWS_AS(make_config(2, {3}).validate(2), std::invalid_argument);
  auto c = make_config(1, {5});
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(2), std::invalid_argument);
  CHECK(even_capacities(100, 8) == std::vector<std::int64_t>(8, 13));
  CHECK(even_capacities(100, 5) == std::vector<std::int64_t>(5, 20));
}

TEST_CASE("assign_devices") {
  std::mt19937_64 g(9);
  SUBCASE("one UAV takes every device") {
    const auto devices = uniform_points(20, 100.0, g);
    const std::vector<UavPosition> centers{{50.0, 50.0, 500.0}};
    const auto a = assign_devices(devices, centers, make_config(1, {20}));
    CHECK(a.uav_of_device == std::vector<std::size_t>(20, 0));
  }
  SUBCASE("reflection symmetry about the x axis") {
    const std::vector<GroundPosition> devices{{10, 5}, {10, -5}, {-30, 20}, {-30, -20}, {70, 1}, {70, -1}};
    const std::vector<UavPosition> centers{{0, 40, 300}, {0, -40, 300}};
    const auto a = assign_devices(devices, centers, make_config(2, {3, 3}));
    for (std::size_t i = 0; i < devices.size(); i += 2) CHECK(a.uav_of_device[i] + a.uav_of_device[i + 1] == 1);
  }
  SUBCASE("12 devices, 3 UAVs of capacity 4 against exhaustive search") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto devices = uniform_points(12, 400.0, g);
      const auto centers_g = uniform_points(3, 400.0, g);
      std::vector<UavPosition> centers;
      for (auto c : centers_g) centers.push_back({c.x, c.y, 600.0});
      Matrix<double> costs(12, 3);
      for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 3; ++j) costs(i, j) = slant_distance_sq(devices[i], centers[j]);
      const auto a = assign_devices(devices, centers, make_config(3, {4, 4, 4}));
      CHECK(a.objective == doctest::Approx(oracle::capacity_minimum(costs, {4, 4, 4})).epsilon(1e-12));
    }
  }
  SUBCASE("out-of-radius devices are named") {
    const std::vector<GroundPosition> devices{{0, 0}, {5000, 0}};
    const std::vector<UavPosition> centers{{0, 0, 100}};
    try {
      assign_devices(devices, centers, make_config(1, {2}));
      FAIL("expected infeasibility");
    } catch (const InfeasibleError& e) {
      CHECK(e.indices() == std::vector<std::size_t>{1});
    }
  }
}

TEST_CASE("update_center closed cases") {
  const std::vector<GroundPosition> single{{12.5, -4.0}};
  const auto c = update_center(single, kTheta, 100.0);
  CHECK(c.x == doctest::Approx(12.5));
  CHECK(c.y == doctest::Approx(-4.0));
  CHECK(c.h == 100.0);

  const double s = 37.0;
  const std::vector<GroundPosition> pair{{-s, 0.0}, {s, 0.0}};
  const auto p = update_center(pair, 45.0, 0.0);
  CHECK(std::abs(p.x) < 1e-9);
  CHECK(std::abs(p.y) < 1e-9);
  CHECK(p.h == doctest::Approx(s).epsilon(1e-12));

  const std::vector<GroundPosition> same{{3, 3}, {3, 3}, {3, 3}};
  const auto z = update_center(same, kTheta, 0.0);
  CHECK(z.h == 0.0);
  CHECK(z.x == 3.0);
}

TEST_CASE("update_center against the grid oracle") {
  std::mt19937_64 g(21);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + trial % 10;
    const auto members = uniform_points(n, 150.0, g);
    const double h_min = (trial % 3 == 0) ? 0.0 : 100.0;
    const auto center = update_center(members, kTheta, h_min);
    const auto ref = oracle::grid_center(members, kTheta, h_min);
    const double got = center_objective(members, center);
    CHECK(got <= ref.value * (1.0 + 1e-9));
    CHECK(std::abs(got - ref.value) <= 1e-3 * ref.value);
    CHECK(center.h >= h_min);
    for (const auto& m : members) CHECK(elevation_deg(m, center) >= kTheta - 1e-6);
  }
}

TEST_CASE("update_center with a large hull uses the fallback") {
  std::vector<GroundPosition> ring;
  for (int i = 0; i < 60; ++i) {
    const double a = 2.0 * kPi * i / 60.0;
    ring.push_back({100.0 + 80.0 * std::cos(a), 50.0 + 80.0 * std::sin(a) * (1.0 + 0.1 * (i % 2))});
  }
  const auto center = update_center(ring, kTheta, 0.0);
  const auto ref = oracle::grid_center(ring, kTheta, 0.0);
  CHECK(std::abs(center_objective(ring, center) - ref.value) <= 1e-3 * ref.value);
}

TEST_CASE("QCQP data reproduces the update objective and constraints") {
  std::mt19937_64 g(8);
  const auto members = uniform_points(7, 200.0, g);
  const auto q = build_qcqp(members, kTheta);
  const auto center = update_center(members, kTheta, 0.0);
  const QcqpData::Vec3 s{center.x, center.y, center.h};
  const double direct = center_objective(members, center);
  CHECK(q.objective(s) == doctest::Approx(direct).epsilon(1e-9));
  CHECK(oracle::center_value(members, center.x, center.y, kTheta, 0.0) == doctest::Approx(direct).epsilon(1e-9));
  double worst = -1e300;
  for (std::size_t i = 0; i < members.size(); ++i) worst = std::max(worst, q.constraint(i, s));
  CHECK(worst <= 1e-9 * direct);
  CHECK(worst >= -1e-6 * direct);  // the farthest member is tight
  CHECK(q.omega < 0.0);
}

TEST_CASE("update_center_dual") {
  SUBCASE("inactive constraints") {
    const std::vector<GroundPosition> same{{4, -2}, {4, -2}, {4, -2}};
    const auto r = update_center_dual(same, kTheta);
    for (double l : r.lambda) CHECK(l == doctest::Approx(0.0));
    CHECK(r.center.x == doctest::Approx(4.0));
    CHECK(r.center.y == doctest::Approx(-2.0));
    CHECK(r.center.h == doctest::Approx(0.0));
  }
  SUBCASE("symmetric pair") {
    const std::vector<GroundPosition> pair{{-20, 0}, {20, 0}};
    const auto r = update_center_dual(pair, 45.0);
    CHECK(std::abs(r.center.x) < 1e-6);
    CHECK(std::abs(r.center.y) < 1e-6);
    CHECK(r.center.h == doctest::Approx(20.0).epsilon(1e-6));
  }
  SUBCASE("random six-member clusters") {
    std::mt19937_64 g(6);
    for (int trial = 0; trial < 30; ++trial) {
      const auto members = uniform_points(6, 300.0, g);
      const auto r = update_center_dual(members, kTheta);
      const auto primal = update_center(members, kTheta, 0.0);
      const auto ref = oracle::grid_center(members, kTheta, 0.0);
      CHECK(r.dual_value <= center_objective(members, primal) * (1.0 + 1e-9));
      if (r.converged && r.status == DualStatus::kInterior) {
        CHECK(std::abs(center_objective(members, r.center) - ref.value) <= 1e-3 * ref.value);
        CHECK(distance(r.center, primal) < 1e-2);
      }
      CHECK(distance(r.recovered, primal) < 1e-2);
      CHECK(r.dual_value == doctest::Approx(center_objective(members, primal)).epsilon(1e-9));
    }
  }
}

TEST_CASE("cluster_devices on separated blobs") {
  std::vector<GroundPosition> devices;
  const std::vector<GroundPosition> blobs{{100, 100}, {900, 150}, {500, 1000}};
  for (const auto& b : blobs)
    for (int i = 0; i < 4; ++i) devices.push_back({b.x + (i % 2) * 2.0, b.y + (i / 2) * 2.0});
  const auto r = cluster_devices(devices, make_config(3, {4, 4, 4}, 5));
  CHECK(r.converged);
  CHECK(r.trace.size() <= 3);
  auto centers = r.centers();
  for (const auto& b : blobs) {
    double best = 1e300;
    for (const auto& c : centers) best = std::min(best, ground_distance(c.ground(), {b.x + 1.0, b.y + 1.0}));
    CHECK(best < 1e-6);
  }
}

TEST_CASE("cluster_devices on a uniform snapshot") {
  std::mt19937_64 g(2);
  const auto devices = uniform_points(100, 1200.0, g);
  auto cfg = make_config(5, std::vector<std::int64_t>(5, 30), 17);
  const auto r = cluster_devices(devices, cfg);
  std::size_t total = 0;
  std::vector<int> seen(devices.size(), 0);
  for (std::size_t j = 0; j < r.clusters.size(); ++j) {
    const auto& cl = r.clusters[j];
    CHECK(cl.members.size() >= 1);
    CHECK(cl.members.size() <= 30);
    total += cl.members.size();
    for (auto i : cl.members) {
      ++seen[i];
      CHECK(r.uav_of_device[i] == j);
      CHECK(elevation_deg(devices[i], cl.center) >= kTheta - 1e-6);
    }
    CHECK(cl.center.h >= cfg.min_altitude);
  }
  CHECK(total == 100);
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));

  const auto obj = r.objectives();
  CHECK(std::is_sorted(obj.rbegin(), obj.rend()));
  for (const auto& rec : r.trace) CHECK(rec.update_objective <= rec.assignment_objective * (1.0 + 1e-9));

  SUBCASE("determinism") {
    const auto again = cluster_devices(devices, cfg);
    CHECK(again.objectives() == obj);
    CHECK(again.uav_of_device == r.uav_of_device);
  }
  SUBCASE("restarts never do worse than the first run") {
    auto multi = cfg;
    multi.restarts = 6;
    const auto best = cluster_devices(devices, multi);
    CHECK(best.objectives().back() <= obj.back());
  }
  SUBCASE("warm start from the converged centers is a fixed point") {
    const auto warm = cluster_devices(devices, cfg, r.centers());
    CHECK(warm.objectives().back() <= obj.back() * (1.0 + 1e-12));
    CHECK(warm.trace.size() <= 2);
  }
}

TEST_CASE("cluster_devices raises altitudes when seeds cannot reach devices") {
  const std::vector<GroundPosition> devices{{0, 0}, {1000, 0}, {0, 1000}, {1000, 1000}, {500, 500}};
  auto cfg = make_config(1, {5});
  cfg.min_altitude = 10.0;
  const auto r = cluster_devices(devices, cfg);
  CHECK(r.trace.front().altitudes_raised);
  for (const auto& d : devices) CHECK(elevation_deg(d, r.clusters[0].center) >= kTheta - 1e-6);
}

TEST_CASE("total_power") {
  channel::LinkParams link;
  channel::ChannelParams ch;
  const std::vector<GroundPosition> one{{0, 0}};
  const std::vector<Cluster> single{{{0}, {30, 40, 120}}};
  const double d = std::sqrt(30.0 * 30 + 40 * 40 + 120 * 120);
  CHECK(total_power(one, single, link, ch) == doctest::Approx(channel::min_transmit_power(d, link, ch)));

  std::mt19937_64 g(12);
  auto devices = uniform_points(40, 1000.0, g);
  auto cfg = make_config(4, std::vector<std::int64_t>(4, 10));
  const auto r = cluster_devices(devices, cfg);
  const double p = total_power(devices, r.clusters, link, ch);

  double independent = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const auto& c = r.clusters[r.uav_of_device[i]].center;
    const double dd = std::sqrt((devices[i].x - c.x) * (devices[i].x - c.x) +
                                (devices[i].y - c.y) * (devices[i].y - c.y) + c.h * c.h);
    independent += oracle::min_transmit_power(dd, link.delta, link.R_b, link.N_o, ch.eta, ch.f_c, ch.c);
  }
  CHECK(p == doctest::Approx(independent).epsilon(1e-8));
  CHECK(std::isfinite(p));
  CHECK(p > 0.0);

  auto scaled_clusters = r.clusters;
  for (auto& cl : scaled_clusters) cl.center = {2 * cl.center.x, 2 * cl.center.y, 2 * cl.center.h};
  for (auto& dv : devices) dv = {2 * dv.x, 2 * dv.y};
  CHECK(total_power(devices, scaled_clusters, link, ch) == doctest::Approx(4.0 * p).epsilon(1e-12));
}
