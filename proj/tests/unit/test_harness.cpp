#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mavi/geometry/ply_io.hpp"
#include "mavi/harness/config.hpp"
#include "mavi/harness/evaluation.hpp"
#include "mavi/harness/facility.hpp"
#include "mavi/harness/odometry.hpp"
#include "mavi/harness/pipeline.hpp"
#include "mavi/trajectory/planner.hpp"

using namespace mavi;

namespace {

FacilitySpec small_spec() {
  FacilitySpec s;
  s.length = 8.0;
  s.width = 6.0;
  s.height = 3.0;
  s.columns = {1, 2, 0.3, 3.0, 3.0};
  s.point_spacing = 0.15;
  return s;
}

}  // namespace

TEST_CASE("facility labels and determinism") {
  FacilitySpec none = small_spec();
  none.columns.rows = 0;
  const Facility f0 = gen_facility(none);
  for (int l : f0.cloud.labels) CHECK((l == kGroundLabel || l == kRoofLabel || is_wall_label(l)));
  CHECK(f0.column_centers.empty());

  const Facility full = gen_facility(FacilitySpec::full());
  std::set<int> cols;
  for (int l : full.cloud.labels)
    if (is_column_label(l)) cols.insert(l);
  CHECK(cols.size() == 27);
  CHECK(full.wall_count == 6);

  std::ostringstream a, b;
  write_ply(a, gen_facility(small_spec()).cloud);
  write_ply(b, gen_facility(small_spec()).cloud);
  CHECK(a.str() == b.str());
  FacilitySpec other = small_spec();
  other.seed = 2;
  std::ostringstream c;
  write_ply(c, gen_facility(other).cloud);
  CHECK(c.str() != a.str());
}

TEST_CASE("facility surfaces, noise and world agree") {
  const FacilitySpec spec = small_spec();
  const Facility f = gen_facility(spec);
  f.cloud.validate();
  for (std::size_t i = 0; i < f.cloud.size(); ++i) {
    const Vec3& p = f.cloud.points[i];
    const int l = f.cloud.labels[i];
    if (l == kGroundLabel) CHECK(p.z() == doctest::Approx(0.0));
    if (l == kRoofLabel) CHECK(p.z() == doctest::Approx(spec.height));
    if (is_column_label(l)) {
      const Vec2 c = f.column_centers[l - kColumnLabelBase];
      CHECK((p.head<2>() - c).norm() == doctest::Approx(spec.columns.radius).epsilon(1e-9));
    }
  }
  // Rays from inside the hall hit the surface the cloud samples.
  const auto hit = f.world.raycast(Vec3(1.0, 3.0, 1.5), Vec3(-1, 0, 0), 10.0);
  REQUIRE(hit);
  CHECK(hit->distance == doctest::Approx(1.0));
  const VoxelGrid truth = f.truth_grid(0.2);
  CHECK(truth.is_obstacle(truth.key_of(Vec3(f.column_centers[0].x(), f.column_centers[0].y(), 1.0))));
  CHECK_FALSE(truth.is_blocked(truth.key_of(Vec3(1.5, 1.5, 1.5))));

  FacilitySpec noisy = spec;
  noisy.noise_sigma = 0.02;
  const Facility g = gen_facility(noisy);
  double sq = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < g.cloud.size(); ++i)
    if (g.cloud.labels[i] == kGroundLabel) sq += g.cloud.points[i].z() * g.cloud.points[i].z(), ++n;
  CHECK(std::sqrt(sq / n) == doctest::Approx(0.02).epsilon(0.1));

  FacilitySpec bad = spec;
  bad.height = 0.0;
  CHECK_THROWS_AS(gen_facility(bad), InvalidInput);
  bad = spec;
  bad.columns.spacing_x = 20.0;
  CHECK_THROWS_AS(gen_facility(bad), InvalidInput);
}

TEST_CASE("F1 examples") {
  std::vector<Vec2> truth;
  for (int i = 0; i < 27; ++i) truth.emplace_back(8.0 * (i % 9), 12.0 * (i / 9));
  std::vector<Vec2> pred(truth.begin(), truth.begin() + 25);
  for (auto& p : pred) p += Vec2(0.1, -0.05);
  F1Score s = eval_f1(pred, truth, 4.0);
  CHECK(s.true_positives == 25);
  CHECK(s.f1 == doctest::Approx(2.0 * 25 / (25 + 27)));
  CHECK(s.f1 == doctest::Approx(0.962).epsilon(1e-3));
  pred.emplace_back(100.0, 100.0);
  s = eval_f1(pred, truth, 4.0);
  CHECK(s.precision == doctest::Approx(25.0 / 26));
  CHECK(s.recall == doctest::Approx(25.0 / 27));
  CHECK(s.f1 == doctest::Approx(0.943).epsilon(1e-3));
  CHECK(eval_f1(truth, truth, 4.0).f1 == 1.0);
  CHECK(eval_f1({}, truth, 4.0).f1 == 0.0);
  // Two predictions near one truth column: only one can match.
  CHECK(eval_f1({Vec2(0, 0), Vec2(0.1, 0)}, {Vec2(0, 0)}, 1.0).true_positives == 1);
}

TEST_CASE("F1 from segmented instances uses truth label centroids") {
  const Facility f = gen_facility(small_spec());
  std::vector<StructureInstance> cols;
  for (const auto& c : f.column_centers) {
    StructureInstance s;
    s.kind = StructureKind::Column;
    s.axis = ColumnAxis{c + Vec2(0.05, 0.0), 0.0, 3.0};
    cols.push_back(s);
  }
  CHECK(eval_f1(cols, f.cloud, 1.5).f1 == 1.0);
  cols[0].axis->center += Vec2(2.0, 0.0);
  CHECK(eval_f1(cols, f.cloud, 1.5).f1 == doctest::Approx(0.5));
}

TEST_CASE("wall fraction examples") {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.push_back(Vec3(i, 0, 0), Vec3::UnitY(), i < 8 ? kWallLabelBase : kGroundLabel);
  StructureInstance all, half, none;
  for (int i = 0; i < 10; ++i) all.indices.push_back(i);
  for (int i = 0; i < 4; ++i) half.indices.push_back(i);
  CHECK(eval_wall_fraction({all}, c) == 1.0);
  CHECK(eval_wall_fraction({half}, c) == 0.5);
  CHECK(eval_wall_fraction({none}, c) == 0.0);
  CHECK(eval_wall_fraction({}, c) == 0.0);
  // Overlapping instances count each point once.
  CHECK(eval_wall_fraction({half, half}, c) == 0.5);
}

TEST_CASE("tracking statistics") {
  std::vector<double> t;
  std::vector<Vec3> ref, exe;
  for (int i = 0; i <= 300; ++i) {
    t.push_back(0.01 * i);
    ref.emplace_back(std::sin(0.01 * i), 0.5 * i * 0.01, 1.0);
  }
  TrackingStats s = eval_tracking(t, ref, ref);
  CHECK(s.ape_rmse == 0.0);
  CHECK(s.rpe_max == 0.0);

  for (const auto& r : ref) exe.push_back(r + Vec3(0.1, 0, 0));
  s = eval_tracking(t, ref, exe);
  CHECK(s.ape_rmse == doctest::Approx(0.1));
  CHECK(s.ape_max == doctest::Approx(0.1));
  CHECK(s.rpe_rmse == doctest::Approx(0.0).epsilon(1e-12));

  // Random injected errors against a direct evaluation.
  std::mt19937 rng(3);
  std::normal_distribution<double> N(0.0, 0.05);
  exe.clear();
  for (const auto& r : ref) exe.push_back(r + Vec3(N(rng), N(rng), N(rng)));
  s = eval_tracking(t, ref, exe, 1.0);
  double sq = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = (exe[i] - ref[i]).norm();
    sq += e * e;
    mx = std::max(mx, e);
  }
  CHECK(s.ape_rmse == doctest::Approx(std::sqrt(sq / t.size())));
  CHECK(s.ape_max == doctest::Approx(mx));
  // Samples are 0.01 s apart, so the 1 s partner of i is i + 100.
  sq = 0.0, mx = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i + 100 < t.size(); ++i) {
    const double e = ((exe[i + 100] - exe[i]) - (ref[i + 100] - ref[i])).norm();
    sq += e * e;
    mx = std::max(mx, e);
    ++pairs;
  }
  CHECK(s.rpe_pairs == pairs);
  CHECK(s.rpe_rmse == doctest::Approx(std::sqrt(sq / pairs)));
  CHECK(s.rpe_max == doctest::Approx(mx));

  CHECK_THROWS_AS(eval_tracking({}, {}, {}), InvalidInput);
  CHECK_THROWS_AS(eval_tracking(t, ref, {}), InvalidInput);
}

TEST_CASE("strict config") {
  const PipelineConfig d = parse_config(nlohmann::json::object());
  CHECK(d.profile == "desk");
  CHECK(d.facility.columns.count() == 6);
  CHECK(d.exploration.tau == 0.95);

  const PipelineConfig f = parse_config({{"profile", "full"}, {"seed", 5}});
  CHECK(f.facility.columns.count() == 27);
  CHECK(f.facility.length == 80.0);
  CHECK(f.seed == 5);

  auto message = [](const nlohmann::json& j) {
    try {
      parse_config(j);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({{"exploration", {{"tua", 0.9}}}}).find("exploration.tua") != std::string::npos);
  CHECK(message({{"bogus", 1}}).find("bogus") != std::string::npos);
  CHECK(message({{"facility", {{"partitions", {{{"a", {0, 0}}, {"b", {1, 0}}, {"oops", 1}}}}}}})
            .find("facility.partitions[0].oops") != std::string::npos);
  CHECK(message({{"camera", {{"fx", "six hundred"}}}}).find("camera.fx") != std::string::npos);
  CHECK(message({{"odometry", "gps"}}).find("odometry") != std::string::npos);
  CHECK(message({{"profile", "huge"}}).find("profile") != std::string::npos);
  CHECK(message({{"scan", {{"clearance", 3.0}}}}) != "");

  // Every field survives a write/read round trip.
  PipelineConfig c = PipelineConfig::defaults("full");
  c.odometry = OdometrySource::Eskf;
  c.tracking.speeds = {0.7, 1.4};
  c.facility.obstacles.push_back({Vec3(1, 1, 0), Vec3(2, 2, 1)});
  const nlohmann::json j = config_to_json(c);
  CHECK(config_to_json(parse_config(j)) == j);
}

TEST_CASE("filter-in-the-loop odometry follows the vehicle") {
  EstimationConfig est;
  auto odo = std::make_shared<EskfOdometry>(est, 4);
  FlightSimParams p;
  p.odometry = make_eskf_odometry(odo);
  MavSimState s;
  s.position = Vec3(0, 0, 1);
  const FlightLog log = simulate_flight(sample_route({{0, 0, 1}, {4, 2, 1.5}}, 1.0, 0.5), s, p);
  CHECK(odo->updates() > 10);
  CHECK(odo->max_position_error() < 0.1);
  CHECK(log.rmse() < 0.1);
}

TEST_CASE("pipeline stages write their artifacts") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mavi_test_harness_run";
  fs::remove_all(dir);
  PipelineConfig cfg = PipelineConfig::defaults("desk");
  const EvalReport rep = run_pipeline(cfg, dir.string(), Stage::Segment);
  CHECK(rep.failures.empty());
  REQUIRE(rep.columns);
  CHECK(rep.columns->f1 == 1.0);
  CHECK(*rep.wall_fraction >= 0.85);
  for (const char* f : {"scene.ply", "segmented.ply", "instances.json", "report.json"}) CHECK(fs::exists(dir / f));
  for (const char* d : {"paths", "grids", "logs"}) CHECK(fs::is_directory(dir / d));

  const nlohmann::json j = report_to_json(rep, false);
  CHECK_FALSE(j.contains("timing"));
  CHECK(report_to_json(rep, true).contains("timing"));

  const EvalReport m = evaluate_run_dir(cfg, dir.string());
  CHECK(m.columns->f1 == 1.0);
  CHECK(*m.wall_fraction == doctest::Approx(*rep.wall_fraction));
  CHECK(fs::exists(dir / "metrics.json"));
  fs::remove_all(dir);

  CHECK(parse_stage("explore") == Stage::Explore);
  CHECK_THROWS_AS(parse_stage("dance"), InvalidInput);
}

TEST_CASE("planner benchmark follows the distance pattern") {
  const auto rows = run_planner_benchmark(PipelineConfig::defaults("desk"));
  REQUIRE(rows.size() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(rows[i].success);
    CHECK(rows[i].t_astar_ms == 0.0);
    CHECK(std::abs(rows[i].length - rows[i].distance) <= 0.01 * rows[i].distance);
  }
  CHECK(rows[3].success);
  CHECK(rows[3].t_astar_ms > 0.0);
  CHECK(rows[3].length >= 6.0);
  CHECK(rows[3].length <= 9.0);
  for (const auto& r : rows) CHECK(r.length >= r.distance - 1e-9);
}
