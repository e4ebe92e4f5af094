#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "mavi/exploration/inspection.hpp"
#include "mavi/planning/spiral.hpp"

using namespace mavi;

namespace {

// 12 x 10 x 4 m room with 0.2 m thick shell.
void add_room(World& w) {
  w.add_box({-0.2, -0.2, -0.2}, {12.2, 10.2, 0.0});
  w.add_box({-0.2, -0.2, 4.0}, {12.2, 10.2, 4.2});
  w.add_box({-0.2, -0.2, 0.0}, {0.0, 10.2, 4.0});
  w.add_box({12.0, -0.2, 0.0}, {12.2, 10.2, 4.0});
  w.add_box({0.0, -0.2, 0.0}, {12.0, 0.0, 4.0});
  w.add_box({0.0, 10.0, 0.0}, {12.0, 10.2, 4.0});
}

const Vec2 kColumn(6.0, 5.0);
constexpr double kRadius = 0.3;

InspectionConfig room_config() {
  InspectionConfig cfg;
  cfg.start = Vec3(2.0, 2.0, 1.5);
  cfg.goals.min_altitude = 1.0;
  cfg.goals.max_altitude = 3.0;
  return cfg;
}

struct Scenario {
  World prior_world;
  World world;
  InspectionTask task;
};

Scenario column_scenario() {
  Scenario s;
  add_room(s.prior_world);
  s.prior_world.add_cylinder(kColumn, kRadius, 0.0, 4.0);
  s.world = s.prior_world;
  s.task.target = column_target(0, kColumn, kRadius, 1.2, 2.8);
  s.task.path = gen_spiral_path(kColumn, kRadius, CameraModel{}, 1.2, 2.8, 0).path;
  return s;
}

InspectionReport run(const Scenario& s, const InspectionConfig& cfg) {
  return run_inspection({s.task}, s.world, s.prior_world.occupancy(cfg.resolution), cfg);
}

// Free box of known voxels.
void fill(VoxelGrid& g, const Vec3& lo, const Vec3& hi, VoxelState st) {
  const VoxelKey a = g.key_of(lo), b = g.key_of(hi);
  for (int x = a.x; x <= b.x; ++x)
    for (int y = a.y; y <= b.y; ++y)
      for (int z = a.z; z <= b.z; ++z) g.set({x, y, z}, st);
}

ScanPath line_path(const Vec3& a, const Vec3& b, int n) {
  ScanPath p;
  for (int i = 0; i < n; ++i) p.waypoints.push_back({a + (b - a) * (double(i) / (n - 1)), 0.0});
  return p;
}

}  // namespace

TEST_CASE("world primitives: ray hits and occupancy") {
  World w;
  w.add_cylinder({0.0, 0.0}, 1.0, 0.0, 2.0, 3, 7);
  w.add_box({5.0, -1.0, 0.0}, {6.0, 1.0, 2.0});
  auto hit = w.raycast({-5.0, 0.0, 1.0}, Vec3::UnitX(), 40.0);
  REQUIRE(hit);
  CHECK(hit->distance == doctest::Approx(4.0));
  CHECK(w.primitives()[hit->primitive].instance == 7);
  hit = w.raycast({3.0, 0.0, 1.0}, Vec3::UnitX(), 40.0);
  REQUIRE(hit);
  CHECK(hit->distance == doctest::Approx(2.0));
  CHECK_FALSE(w.raycast({3.0, 0.0, 1.0}, Vec3::UnitX(), 1.5));
  CHECK_FALSE(w.raycast({3.0, 0.0, 3.0}, Vec3::UnitX(), 40.0));
  // Oblique ray onto the cylinder: hit point lies on the surface.
  const Vec3 o(-3.0, 0.5, 0.5);
  const Vec3 d = Vec3(1.0, 0.0, 0.2).normalized();
  hit = w.raycast(o, d, 40.0);
  REQUIRE(hit);
  const Vec3 p = o + hit->distance * d;
  CHECK(p.head<2>().norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w.inside({0.5, 0.5, 1.0}));
  CHECK_FALSE(w.inside({0.8, 0.8, 1.0}));

  const VoxelGrid occ = w.occupancy(0.2);
  // Every sampled point inside a primitive lands in an obstacle voxel.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-1.5, 6.5), uy(-1.5, 1.5), uz(0.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 q(ux(rng), uy(rng), uz(rng));
    if (w.inside(q)) CHECK(occ.is_obstacle(occ.key_of(q)));
  }
  CHECK_FALSE(occ.is_obstacle(occ.key_of({3.0, 0.0, 1.0})));
}

TEST_CASE("lidar fan covers the configured elevations and ranges") {
  LidarConfig cfg;
  const auto dirs = lidar_directions(cfg);
  CHECK(dirs.size() == 180u * 16u);
  double lo = 1, hi = -1;
  for (const auto& d : dirs) {
    CHECK(d.norm() == doctest::Approx(1.0));
    lo = std::min(lo, d.z());
    hi = std::max(hi, d.z());
  }
  CHECK(std::asin(lo) * 180 / std::numbers::pi == doctest::Approx(-7.0));
  CHECK(std::asin(hi) * 180 / std::numbers::pi == doctest::Approx(52.0));

  // Inside the room every ray hits, and points lie on surfaces.
  World w;
  add_room(w);
  const Vec3 o(6.0, 5.0, 2.0);
  const PointCloud pc = simulate_scan(w, o, 0.3, cfg);
  CHECK(pc.size() == dirs.size());
  for (const auto& p : pc.points) {
    const bool on_surface = std::abs(p.x()) < 1e-6 || std::abs(p.x() - 12) < 1e-6 || std::abs(p.y()) < 1e-6 ||
                            std::abs(p.y() - 10) < 1e-6 || std::abs(p.z()) < 1e-6 || std::abs(p.z() - 4) < 1e-6;
    CHECK(on_surface);
  }
  cfg.range = 1.0;
  CHECK(simulate_scan(w, o, 0.0, cfg).empty());
  cfg.noise_sigma = 0.01;
  CHECK_THROWS_AS(simulate_scan(w, o, 0.0, cfg), InvalidInput);
}

TEST_CASE("column goals are evenly spaced at mid height") {
  GoalParams gp;
  gp.goals_per_column = 4;
  const ExplorationTarget t = column_target(1, {1.0, 2.0}, 0.4, 1.0, 3.0);
  VoxelGrid empty(0.2);
  const auto g = gen_exploration_goals(t, 0, empty, gp);
  REQUIRE(g.size() == 4u);
  const double R = 0.4 + gp.camera.distance + gp.margin;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 d = g[i].position.head<2>() - t.center;
    CHECK(d.norm() == doctest::Approx(R));
    CHECK(g[i].position.z() == doctest::Approx(2.0));
    CHECK(std::atan2(d.y(), d.x()) == doctest::Approx(wrap_angle(i * std::numbers::pi / 2)).epsilon(1e-9));
    // Facing the axis.
    CHECK(std::cos(g[i].yaw) * d.x() + std::sin(g[i].yaw) * d.y() == doctest::Approx(-R));
  }

  const double dh = compute_fov(gp.camera).height / 2.0;
  const auto g1 = gen_exploration_goals(t, 1, empty, gp);
  const auto g2 = gen_exploration_goals(t, 2, empty, gp);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK((g1[i].position.head<2>() - g[i].position.head<2>()).norm() < 1e-12);
    CHECK(std::abs(g1[i].position.z() - g[i].position.z()) == doctest::Approx(dh));
    CHECK(std::abs(g2[i].position.z() - g[i].position.z()) == doctest::Approx(dh));
    CHECK(g2[i].position.z() != doctest::Approx(g1[i].position.z()));
  }
  CHECK(height_shift_steps(0) == 0);
  CHECK(height_shift_steps(3) == -2);

  gp.max_altitude = 2.1;
  CHECK(gen_exploration_goals(t, 2, empty, gp)[0].position.z() == doctest::Approx(2.1));
}

TEST_CASE("wall goals sit on the free side, one per footprint width") {
  GoalParams gp;
  gp.camera.fx = 480.0;  // FOV_w = 2 m at D = 1.5
  REQUIRE(compute_fov(gp.camera).width == doctest::Approx(2.0));
  BoundingGridMap grid;
  grid.rows = 3;
  grid.cols = 4;
  grid.cell = 1.0;
  grid.values.assign(12, 1.0);
  grid.offset = gp.camera.distance;
  grid.normal = -Vec3::UnitY();  // wall at y = 5, free side toward -y
  grid.u = Vec3::UnitX();
  grid.v = Vec3::UnitZ();
  grid.origin = Vec3(0.0, 5.0 - grid.offset, 0.5);
  const ExplorationTarget t = wall_target(2, grid);
  CHECK(t.wall_width == doctest::Approx(4.0));
  CHECK(t.h_min == doctest::Approx(0.5));
  CHECK(t.h_max == doctest::Approx(3.5));

  const auto g = gen_exploration_goals(t, 0, VoxelGrid(0.2), gp);
  REQUIRE(g.size() == 2u);
  for (const auto& w : g) {
    CHECK(w.position.y() == doctest::Approx(5.0 - gp.camera.distance - gp.margin));
    CHECK(w.position.z() == doctest::Approx(2.0));
    CHECK(std::sin(w.yaw) == doctest::Approx(1.0));  // looking at the wall
  }
  CHECK(g[0].position.x() == doctest::Approx(1.0));
  CHECK(g[1].position.x() == doctest::Approx(3.0));
}

TEST_CASE("blocked goals are pushed outward or the lap is rejected") {
  GoalParams gp;
  gp.goals_per_column = 4;
  const ExplorationTarget t = column_target(1, {0.0, 0.0}, 0.5, 1.0, 3.0);
  const double R = 0.5 + gp.camera.distance + gp.margin;
  VoxelGrid g(0.2);
  // Block the goal on +x with a thin slab; it moves past it.
  fill(g, {R - 0.2, -0.3, 0.0}, {R + 0.3, 0.3, 4.0}, VoxelState::Inflated);
  auto goals = gen_exploration_goals(t, 0, g, gp);
  REQUIRE(goals.size() == 4u);
  CHECK(goals[0].position.x() > R + 0.3);
  CHECK_FALSE(g.is_blocked(g.key_of(goals[0].position)));
  // A slab thicker than the relocation reach drops that goal.
  fill(g, {-0.3, R - 0.2, 0.0}, {0.3, R + 2.0, 4.0}, VoxelState::Obstacle);
  goals = gen_exploration_goals(t, 0, g, gp);
  CHECK(goals.size() == 3u);
  // Everything blocked.
  fill(g, {-5, -5, 1.5}, {5, 5, 2.5}, VoxelState::Obstacle);
  CHECK_THROWS_AS(gen_exploration_goals(t, 0, g, gp), Error);
}

TEST_CASE("region of interest matches brute-force enumeration") {
  ScanPath p;
  p.waypoints = {{{0.0, 0.0, 1.0}, 0.0}, {{2.0, 1.0, 1.5}, 0.0}, {{2.5, 3.0, 1.0}, 0.0}};
  const double r = 0.2, dil = 0.5;
  const auto roi = region_of_interest(p, r, dil);

  VoxelGrid frame(r);
  std::set<VoxelKey> expect;
  for (int x = -10; x <= 20; ++x)
    for (int y = -10; y <= 25; ++y)
      for (int z = 0; z <= 15; ++z) {
        const Vec3 c = frame.center_of({x, y, z});
        double best = 1e9;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
          // Dense sampling along the segment as an independent distance.
          const Vec3 a = p.waypoints[i].position, b = p.waypoints[i + 1].position;
          for (int s = 0; s <= 4000; ++s) best = std::min(best, (c - (a + (b - a) * (s / 4000.0))).norm());
        }
        if (best <= dil - 1e-3) expect.insert({x, y, z});
        if (best <= dil + 1e-3 && best > dil - 1e-3) expect.insert({x, y, z});  // boundary band
      }
  std::set<VoxelKey> got(roi.begin(), roi.end());
  CHECK(got.size() == roi.size());
  for (const auto& k : got) CHECK(expect.contains(k));
  std::size_t core = 0;
  for (const auto& k : expect) core += got.contains(k) ? 1 : 0;
  CHECK(static_cast<double>(core) / expect.size() > 0.99);
}

TEST_CASE("exploration rate: empty, full, half, monotone under raycasting") {
  const ScanPath p = line_path({1.0, 1.0, 1.0}, {5.0, 1.0, 1.0}, 5);
  const auto roi = region_of_interest(p, 0.2, 0.5);
  REQUIRE(roi.size() > 100);
  VoxelGrid map(0.2);
  CHECK(exploration_rate(map, roi) == 0.0);
  CHECK(exploration_rate(map, {}) == 1.0);
  for (std::size_t i = 0; i < roi.size() / 2; ++i) map.set(roi[i], i % 2 ? VoxelState::Obstacle : VoxelState::Free);
  CHECK(std::abs(exploration_rate(map, roi) - 0.5) <= 1.0 / roi.size());
  for (const auto& k : roi) map.set(k, VoxelState::Free);
  CHECK(exploration_rate(map, roi) == 1.0);

  // Raycast-observed half: scans from a sensor looking down the line, with a
  // wall at x = 3 hiding the far half.
  World w;
  w.add_box({3.0, -2.0, -1.0}, {3.2, 4.0, 3.0});
  w.add_box({-2.0, -2.0, -1.0}, {8.0, 4.0, 0.0});
  VoxelGrid seen(0.2, Aabb{{-2, -2, -1}, {8, 4, 3}});
  LidarConfig lc;
  lc.elevation_min_deg = -60;
  lc.elevation_max_deg = 60;
  lc.channels = 40;
  lc.azimuth_step_deg = 1.0;
  double prev = 0.0;
  for (double x : {0.2, 0.6, 1.0, 1.4}) {
    const Vec3 o(x, 1.0, 1.0);
    seen.raycast_update(o, simulate_scan(w, o, 0.0, lc));
    const double a = exploration_rate(seen, roi);
    CHECK(a >= prev);
    prev = a;
  }
  // Voxels behind the wall are never seen, the near side is.
  std::size_t near = 0, near_known = 0, far_known = 0;
  for (const auto& k : roi) {
    const double cx = seen.center_of(k).x();
    if (cx < 2.9) {
      ++near;
      near_known += seen.is_known(k);
    } else if (cx > 3.3) {
      far_known += seen.is_known(k);
    }
  }
  CHECK(far_known == 0u);
  CHECK(static_cast<double>(near_known) / near > 0.9);
}

TEST_CASE("check_and_replan leaves free paths alone and detours around a pillar") {
  VoxelGrid g(0.2);
  fill(g, {-1.0, -1.0, 0.0}, {5.0, 1.0, 2.0}, VoxelState::Free);
  const ScanPath p = line_path({0.1, 0.1, 1.1}, {4.1, 0.1, 1.1}, 21);
  auto r = check_and_replan(g, p);
  REQUIRE(r.ok);
  REQUIRE(r.path.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(r.path.waypoints[i].position == p.waypoints[i].position);
  CHECK(r.blocked == 0);

  // One-voxel pillar through waypoint 10.
  const VoxelKey c = g.key_of(p.waypoints[10].position);
  for (int z = 0; z < 10; ++z) g.set({c.x, c.y, z}, VoxelState::Obstacle);
  r = check_and_replan(g, p);
  REQUIRE(r.ok);
  CHECK(r.blocked == 1);
  CHECK(r.path.size() >= p.size());
  CHECK(r.path.length() > p.length() + 1e-6);
  for (const auto& w : r.path.waypoints) CHECK_FALSE(g.is_blocked(g.key_of(w.position)));
  for (std::size_t i = 0; i < r.source.size(); ++i)
    if (r.source[i] >= 0) CHECK(r.path.waypoints[i].position == p.waypoints[r.source[i]].position);
  std::size_t kept = 0;
  for (int s : r.source) kept += s >= 0;
  CHECK(kept == p.size() - 1);

  // Inflated voxels count as blocked too.
  VoxelGrid g2 = g;
  g2.set(g2.key_of(p.waypoints[15].position), VoxelState::Inflated);
  r = check_and_replan(g2, p);
  REQUIRE(r.ok);
  CHECK(r.blocked == 2);

  // Blocked endpoints.
  g.set(g.key_of(p.waypoints.front().position), VoxelState::Obstacle);
  r = check_and_replan(g, p);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.failure.empty());

  // No route at all: a solid wall across the whole free region.
  VoxelGrid g3(0.2, Aabb{{-1.0, -1.0, 0.0}, {5.0, 1.0, 2.0}});
  fill(g3, {-1.0, -1.0, 0.0}, {5.0, 1.0, 2.0}, VoxelState::Free);
  fill(g3, {2.0, -1.0, 0.0}, {2.2, 1.0, 2.0}, VoxelState::Obstacle);
  CHECK_FALSE(check_and_replan(g3, p).ok);
}

TEST_CASE("helix densification follows the spiral") {
  const auto sp = gen_spiral_path(kColumn, kRadius, CameraModel{}, 1.2, 2.8, 0);
  std::vector<int> src;
  const ScanPath d = densify_helix(sp.path, kColumn, 0.3, &src);
  REQUIRE(src.size() == d.size());
  CHECK(d.max_spacing() <= 0.3 + 1e-9);
  int orig = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Vec3& p = d.waypoints[i].position;
    CHECK((p.head<2>() - kColumn).norm() == doctest::Approx(sp.radius));
    if (src[i] >= 0) {
      CHECK(src[i] == orig);
      CHECK(p == sp.path.waypoints[orig].position);
      ++orig;
    }
  }
  CHECK(orig == static_cast<int>(sp.path.size()));
  // Two turns of a helix of radius r + D.
  const double turn = 2 * std::numbers::pi * sp.radius;
  CHECK(d.length() == doctest::Approx(std::hypot(2 * turn, 1.6)).epsilon(1e-2));
}

TEST_CASE("inspection of a lone column succeeds after one lap") {
  const Scenario s = column_scenario();
  const InspectionConfig cfg = room_config();
  const auto rep = run(s, cfg);
  REQUIRE(rep.instances.size() == 1u);
  const auto& r = rep.instances[0];
  CHECK(r.success);
  CHECK(r.laps == 1);
  CHECK(r.alpha_history.front() >= cfg.tau);
  CHECK(r.alpha_monotone);
  CHECK(r.violations == 0);
  CHECK(rep.violations == 0);
  CHECK(r.replaced_waypoints == 0);
  CHECK(r.captures.size() == s.task.path.size());
  for (const auto& c : r.captures) CHECK(c.error < cfg.capture_tolerance);
  CHECK(r.exploration_distance > 0.0);
  CHECK(r.scan_length == doctest::Approx(r.planned_scan_length).epsilon(0.05));
  // Ground truth check, independent of the grid: no logged sample inside a solid.
  for (const auto& f : rep.trajectory) CHECK_FALSE(s.world.inside(f.position));
}

TEST_CASE("unexpected obstacle on the spiral forces a longer detour") {
  Scenario s = column_scenario();
  const auto free_rep = run(s, room_config());
  s.world.add_box({3.8, 4.0, 0.0}, {4.4, 6.0, 4.0});
  const auto rep = run(s, room_config());
  const auto& r = rep.instances[0];
  CHECK(r.success);
  CHECK(r.replaced_waypoints > 0);
  CHECK(r.violations == 0);
  CHECK(r.alpha_monotone);
  CHECK(r.planned_scan_length > free_rep.instances[0].planned_scan_length);
  for (std::size_t i = 1; i < r.alpha_history.size(); ++i) CHECK(r.alpha_history[i] >= r.alpha_history[i - 1]);
  CHECK(r.laps <= 1 + room_config().max_retries);
}

TEST_CASE("obstacle between start and goal triggers an in-flight replan") {
  Scenario s = column_scenario();
  // Wall across the direct line from the start to the first goal.
  s.world.add_box({4.5, 0.0, 0.0}, {4.7, 3.6, 4.0});
  InspectionConfig cfg = room_config();
  cfg.start = Vec3(3.0, 1.0, 2.0);
  const auto rep = run(s, cfg);
  const auto& r = rep.instances[0];
  CHECK(r.replans >= 1);
  CHECK(r.violations == 0);
  CHECK(r.success);
}

TEST_CASE("an enclosed column is reported unreachable") {
  Scenario s = column_scenario();
  // Hollow shell whose walls run through the scan path.
  const double a = 1.7, t = 0.25;
  const Vec2 c = kColumn;
  s.world.add_box({c.x() - a - t, c.y() - a - t, 0}, {c.x() + a + t, c.y() - a, 4});
  s.world.add_box({c.x() - a - t, c.y() + a, 0}, {c.x() + a + t, c.y() + a + t, 4});
  s.world.add_box({c.x() - a - t, c.y() - a, 0}, {c.x() - a, c.y() + a, 4});
  s.world.add_box({c.x() + a, c.y() - a, 0}, {c.x() + a + t, c.y() + a, 4});
  InspectionConfig cfg = room_config();
  cfg.max_retries = 0;
  const auto rep = run(s, cfg);
  const auto& r = rep.instances[0];
  CHECK_FALSE(r.success);
  CHECK(r.unreachable);
  CHECK_FALSE(r.failure.empty());
  CHECK(r.violations == 0);
}

TEST_CASE("inspection is deterministic for a fixed seed") {
  const Scenario s = column_scenario();
  InspectionConfig cfg = room_config();
  cfg.lidar.noise_sigma = 0.02;
  cfg.seed = 11;
  const auto a = run(s, cfg);
  const auto b = run(s, cfg);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) CHECK(a.trajectory[i].position == b.trajectory[i].position);
  CHECK(a.instances[0].alpha_history == b.instances[0].alpha_history);
}
