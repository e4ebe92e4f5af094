#include "mavi/harness/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <spdlog/spdlog.h>

#include "mavi/exploration/inspection.hpp"
#include "mavi/geometry/ply_io.hpp"
#include "mavi/harness/odometry.hpp"
#include "mavi/planning/ccpp.hpp"
#include "mavi/planning/spiral.hpp"
#include "mavi/quality/image.hpp"
#include "mavi/quality/niqe.hpp"
#include "mavi/quality/synth_images.hpp"

namespace mavi {

namespace fs = std::filesystem;
using nlohmann::json;

Stage parse_stage(const std::string& s) {
  static const std::pair<const char*, Stage> names[] = {
      {"gen", Stage::Gen},         {"segment", Stage::Segment}, {"plan", Stage::Plan},
      {"explore", Stage::Explore}, {"estimate", Stage::Estimate}, {"fly", Stage::Fly},
      {"metrics", Stage::Metrics}, {"all", Stage::All}};
  for (const auto& [n, st] : names)
    if (s == n) return st;
  throw InvalidInput("unknown stage '" + s + "'");
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Gen: return "gen";
    case Stage::Segment: return "segment";
    case Stage::Plan: return "plan";
    case Stage::Explore: return "explore";
    case Stage::Estimate: return "estimate";
    case Stage::Fly: return "fly";
    case Stage::Metrics: return "metrics";
    case Stage::All: return "all";
  }
  return "?";
}

int EvalReport::inspection_successes() const {
  return static_cast<int>(std::count_if(inspection.begin(), inspection.end(), [](const auto& r) { return r.success; }));
}

double EvalReport::inspection_success_rate() const {
  return inspection.empty() ? 1.0 : static_cast<double>(inspection_successes()) / inspection.size();
}

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

json tracking_json(const TrackingStats& s) {
  return {{"ape_max", s.ape_max}, {"ape_rmse", s.ape_rmse}, {"rpe_max", s.rpe_max},
          {"rpe_rmse", s.rpe_rmse}, {"samples", s.samples}, {"rpe_pairs", s.rpe_pairs}};
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_speed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

template <class F>
void write_file(const fs::path& p, F&& f) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  f(out);
}

// Per-point predicted label in the same scheme as the truth labels.
std::vector<int> predicted_labels(const Segmentation& seg, std::size_t n) {
  std::vector<int> l(n, -1);
  for (int i : seg.ground.indices) l[i] = kGroundLabel;
  for (int i : seg.roof.indices) l[i] = kRoofLabel;
  for (std::size_t k = 0; k < seg.walls.size(); ++k)
    for (int i : seg.walls[k].indices) l[i] = kWallLabelBase + static_cast<int>(k);
  for (std::size_t k = 0; k < seg.columns.size(); ++k)
    for (int i : seg.columns[k].indices) l[i] = kColumnLabelBase + static_cast<int>(k);
  return l;
}

double column_match_distance(const FacilitySpec& f) {
  double s = 1e300;
  if (f.columns.cols > 1) s = std::min(s, f.columns.spacing_x);
  if (f.columns.rows > 1) s = std::min(s, f.columns.spacing_y);
  return s < 1e299 ? 0.5 * s : 1.0;
}

// Height of a horizontal plane at (x, y), or the mean z of its points.
double plane_height(const StructureInstance& s, const PointCloud& cloud, const Vec2& xy) {
  if (s.plane && std::abs(s.plane->normal.z()) > 0.5) {
    const auto& n = s.plane->normal;
    return -(n.x() * xy.x() + n.y() * xy.y() + s.plane->d) / n.z();
  }
  if (s.indices.empty()) throw Error("structure has neither plane nor points");
  double z = 0.0;
  for (int i : s.indices) z += cloud.points[i].z();
  return z / s.indices.size();
}

PlannerParams planner_params(const PipelineConfig& cfg) {
  PlannerParams p;
  p.cruise_speed = cfg.planner.cruise_speed;
  p.weights = cfg.planner.weights;
  p.optimizer.max_iterations = cfg.planner.max_iterations;
  return p;
}

class Pipeline {
 public:
  Pipeline(const PipelineConfig& cfg, const fs::path& dir) : cfg_(cfg), dir_(dir) {
    rep_.profile = cfg.profile;
    rep_.seed = cfg.seed;
    rep_.odometry = cfg.odometry;
    for (const char* sub : {"paths", "grids", "logs"}) fs::create_directories(dir_ / sub);
  }

  EvalReport run(Stage stage) {
    step("gen", [&] { gen(); });
    if (stage == Stage::Gen) return finish();
    if (stage == Stage::Estimate) {
      step("estimate", [&] { estimate(); });
      return finish();
    }
    step("segment", [&] { segment(); });
    if (stage == Stage::Segment) return finish();
    step("plan", [&] { plan(); });
    step("benchmark", [&] { benchmark(); });
    if (stage == Stage::Plan) return finish();
    if (stage == Stage::Explore || stage == Stage::All) step("explore", [&] { explore(); });
    if (stage == Stage::All) step("estimate", [&] { estimate(); });
    if (stage == Stage::Fly || stage == Stage::All) step("fly", [&] { fly(); });
    if (stage == Stage::All) step("quality", [&] { quality(); });
    return finish();
  }

 private:
  template <class F>
  void step(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      f();
      rep_.stages.push_back(name);
    } catch (const std::exception& e) {
      rep_.failures.push_back(name + ": " + e.what());
      spdlog::error("stage {} failed: {}", name, e.what());
    }
    rep_.timing_ms[name] = ms_since(t0);
    spdlog::info("stage {} done in {:.1f} s", name, rep_.timing_ms[name] / 1000.0);
  }

  EvalReport finish() {
    write_text(dir_ / "report.json", report_to_json(rep_).dump(2) + "\n");
    return rep_;
  }

  void gen() {
    FacilitySpec spec = cfg_.facility;
    spec.seed = cfg_.seed;
    facility_ = gen_facility(spec);
    write_ply((dir_ / "scene.ply").string(), facility_->cloud);
    const VoxelGrid truth = facility_->truth_grid(cfg_.exploration.resolution);
    write_file(dir_ / "grids" / "truth_occupancy.csv", [&](std::ostream& os) {
      os << "ix,iy,iz,state\n";
      truth.write_csv(os);
    });
    // What the sensors deliver: positions only.
    observed_.points = facility_->cloud.points;
    spdlog::info("facility: {} points, {} columns, {} wall faces", observed_.size(),
                 facility_->column_centers.size(), facility_->wall_count);
  }

  void segment() {
    need(facility_.has_value(), "no facility");
    seg_ = segment_structures(observed_, cfg_.segmentation);
    const auto& cloud = facility_->cloud;
    rep_.columns = eval_f1(seg_->columns, cloud, column_match_distance(cfg_.facility));
    rep_.wall_fraction = eval_wall_fraction(seg_->walls, cloud);
    rep_.walls_extracted = static_cast<int>(seg_->walls.size());

    PointCloud labelled = observed_;
    labelled.labels = predicted_labels(*seg_, observed_.size());
    write_ply((dir_ / "segmented.ply").string(), labelled);

    json inst;
    auto plane_json = [](const StructureInstance& s) {
      json j = {{"points", s.indices.size()}};
      if (s.plane) j["plane"] = {{"normal", vec(s.plane->normal)}, {"d", s.plane->d}};
      return j;
    };
    inst["ground"] = plane_json(seg_->ground);
    inst["roof"] = plane_json(seg_->roof);
    inst["columns"] = json::array();
    for (std::size_t k = 0; k < seg_->columns.size(); ++k) {
      const auto& c = seg_->columns[k];
      inst["columns"].push_back({{"id", k},
                                 {"center", vec(c.axis->center)},
                                 {"radius", c.radius},
                                 {"z_min", c.axis->z_min},
                                 {"z_max", c.axis->z_max},
                                 {"points", c.indices.size()}});
    }
    inst["walls"] = json::array();
    for (std::size_t k = 0; k < seg_->walls.size(); ++k) {
      json j = plane_json(seg_->walls[k]);
      j["id"] = k;
      inst["walls"].push_back(j);
    }
    inst["unassigned"] = seg_->unassigned.size();
    write_text(dir_ / "instances.json", inst.dump(2) + "\n");
    spdlog::info("segmentation: {} columns (F1 {:.3f}), {} walls (fraction {:.3f})", seg_->columns.size(),
                 rep_.columns->f1, seg_->walls.size(), *rep_.wall_fraction);
  }

  void plan() {
    need(seg_.has_value(), "no segmentation");
    const Vec2 mid = (0.5 * (facility_->interior.min + facility_->interior.max)).head<2>();
    floor_z_ = plane_height(seg_->ground, observed_, mid);
    roof_z_ = plane_height(seg_->roof, observed_, mid);
    h_min_ = floor_z_ + cfg_.scan.clearance;
    h_max_ = roof_z_ - cfg_.scan.clearance;
    need(h_max_ > h_min_, "scan band between floor and roof is empty");

    prior_ = prior_grid(observed_, cfg_.exploration.resolution);
    const VoxelGrid inflated = make_planning_grid(*prior_, cfg_.planner.weights);
    const Fov fov = compute_fov(cfg_.camera);

    for (std::size_t k = 0; k < seg_->columns.size(); ++k) {
      const auto& c = seg_->columns[k];
      ScanPlanRow row;
      row.id = static_cast<int>(k);
      row.kind = StructureKind::Column;
      try {
        const SpiralPath sp = gen_spiral_path(c, cfg_.camera, h_min_, h_max_, row.id);
        row.coverage = spiral_coverage(sp.path, c.axis->center, c.radius, fov, h_min_, h_max_,
                                       cfg_.scan.coverage_samples, cfg_.seed + k, &row.misses);
        row.planned = true;
        row.waypoints = static_cast<int>(sp.path.size());
        row.length = sp.path.length();
        write_file(dir_ / "paths" / ("column_" + std::to_string(k) + ".csv"),
                   [&](std::ostream& os) { write_path_csv(os, sp.path); });
        tasks_.push_back({column_target(row.id, c.axis->center, c.radius, h_min_, h_max_), sp.path});
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
      rep_.scan_plans.push_back(row);
    }

    WallProjectionOptions opts;
    opts.task_map = &inflated;
    opts.interior_point = 0.5 * (facility_->interior.min + facility_->interior.max);
    for (std::size_t k = 0; k < seg_->walls.size(); ++k) {
      ScanPlanRow row;
      row.id = static_cast<int>(k);
      row.kind = StructureKind::Wall;
      try {
        const BoundingGridMap grid = project_wall(observed_, seg_->walls[k], cfg_.camera, opts);
        write_file(dir_ / "grids" / ("wall_" + std::to_string(k) + ".pgm"),
                   [&](std::ostream& os) { write_grid_pgm(os, grid); });
        const int free = grid.free_count();
        need(free > 0, "no flyable cells in front of the wall");
        const auto cells = ccpp(grid, nearest_free_cell(grid, grid.cell_center(0, 0)));
        std::vector<char> seen(grid.values.size(), 0);
        int visited = 0;
        for (const auto& c : cells) {
          auto& s = seen[static_cast<std::size_t>(c.row) * grid.cols + c.col];
          if (!s && grid.is_free(c.row, c.col)) ++visited;
          s = 1;
        }
        row.coverage = static_cast<double>(visited) / free;
        row.misses = free - visited;
        ScanPath path = grid_path_to_waypoints(cells, grid, row.id);
        if (path.size() < 2) path.waypoints.push_back(path.waypoints.front());
        row.planned = true;
        row.waypoints = static_cast<int>(path.size());
        row.length = path.length();
        write_file(dir_ / "paths" / ("wall_" + std::to_string(k) + ".csv"),
                   [&](std::ostream& os) { write_path_csv(os, path); });
        ExplorationTarget t = wall_target(row.id, grid);
        t.h_min = h_min_;
        t.h_max = h_max_;
        tasks_.push_back({t, path});
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
      rep_.scan_plans.push_back(row);
    }
    spdlog::info("scan planning: {} of {} instances planned", tasks_.size(), rep_.scan_plans.size());
  }

  void benchmark() {
    rep_.planner = run_planner_benchmark(cfg_);
    write_file(dir_ / "logs" / "planner.csv", [&](std::ostream& os) { write_planner_csv(os, rep_.planner); });
  }

  InspectionConfig inspection_config() const {
    const auto& e = cfg_.exploration;
    InspectionConfig ic;
    ic.resolution = e.resolution;
    ic.tau = e.tau;
    ic.max_retries = e.max_retries;
    ic.map_margin = e.map_margin;
    ic.goals.goals_per_column = e.goals_per_column;
    ic.goals.margin = e.goal_margin;
    ic.goals.camera = cfg_.camera;
    ic.goals.min_altitude = h_min_;
    ic.goals.max_altitude = h_max_;
    ic.lidar = e.lidar;
    ic.monitor_rate_hz = e.monitor_rate_hz;
    ic.transit = planner_params(cfg_);
    ic.scan_speed = e.scan_speed;
    ic.flight.dt = cfg_.tracking.dt;
    ic.flight.attitude_tau = cfg_.tracking.attitude_tau;
    ic.flight.gains = cfg_.tracking.gains;
    ic.capture_tolerance = e.capture_tolerance;
    ic.max_replans = e.max_replans;
    ic.start = e.start;
    ic.start_yaw = e.start_yaw;
    ic.seed = cfg_.seed;
    return ic;
  }

  void explore() {
    need(prior_.has_value(), "no scan plans");
    // Greedy nearest-neighbour order over the scan path entry points.
    std::vector<InspectionTask> order;
    std::vector<char> used(tasks_.size(), 0);
    Vec3 at = cfg_.exploration.start;
    for (std::size_t n = 0; n < tasks_.size(); ++n) {
      std::size_t best = 0;
      double bd = 1e300;
      for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (used[i]) continue;
        const double d = (tasks_[i].path.waypoints.front().position - at).norm();
        if (d < bd) bd = d, best = i;
      }
      used[best] = 1;
      order.push_back(tasks_[best]);
      at = tasks_[best].path.waypoints.back().position;
    }

    InspectionConfig ic = inspection_config();
    std::shared_ptr<EskfOdometry> odo;
    if (cfg_.odometry == OdometrySource::Eskf) {
      odo = std::make_shared<EskfOdometry>(cfg_.estimation, cfg_.seed + 17);
      ic.odometry = make_eskf_odometry(odo);
    }
    const InspectionReport ir = run_inspection(order, facility_->world, *prior_, ic);
    rep_.mission_time = ir.mission_time;
    rep_.mission_violations = ir.violations;
    for (const auto& r : ir.instances) {
      InspectionRow row;
      row.id = r.id;
      row.kind = r.kind;
      row.success = r.success;
      row.unreachable = r.unreachable;
      row.laps = r.laps;
      row.alpha_final = r.alpha_final;
      row.alpha_monotone = r.alpha_monotone;
      row.violations = r.violations;
      row.replaced_waypoints = r.replaced_waypoints;
      row.replans = r.replans;
      row.captures = static_cast<int>(std::count_if(r.captures.begin(), r.captures.end(), [](const auto& c) { return c.reached; }));
      row.planned_length = r.planned_scan_length;
      row.flown_length = r.scan_length;
      row.failure = r.failure;
      rep_.inspection.push_back(row);
      if (r.executed_path.size() > 0) {
        const std::string name = std::string(r.kind == StructureKind::Column ? "executed_column_" : "executed_wall_") +
                                 std::to_string(r.id) + ".csv";
        write_file(dir_ / "paths" / name, [&](std::ostream& os) { write_path_csv(os, r.executed_path); });
      }
    }
    write_file(dir_ / "logs" / "mission.csv", [&](std::ostream& os) { write_trajectory_csv(os, ir.trajectory); });
    if (odo) spdlog::info("in-loop filter: {} fixes, max position error {:.3f} m", odo->updates(), odo->max_position_error());
    spdlog::info("inspection: {}/{} instances succeeded, {} violations, {:.0f} s mission", rep_.inspection_successes(),
                 rep_.inspection.size(), ir.violations, ir.mission_time);
  }

  void estimate() {
    need(facility_.has_value(), "no facility");
    const auto& est = cfg_.estimation;
    const GicpMap map(observed_, est.gicp);
    const Vec3 c = cfg_.tracking.curve_center;
    const Vec2 ax = cfg_.tracking.curve_axes;
    const TruthFn base = figure_eight(ax.x(), 0.5 * ax.y(), 10.0, c.z());
    const TruthFn truth = [base, c](double t) {
      TruthSample s = base(t);
      s.p += Vec3(c.x(), c.y(), 0.0);
      return s;
    };
    const LioTrace tr = run_lidar_inertial(facility_->world, map, truth, est.duration, est,
                                           cfg_.exploration.lidar, cfg_.seed + 23);
    EstimationStats st;
    st.duration = est.duration;
    st.updates = tr.updates;
    st.registration_failures = tr.registration_failures;
    std::vector<Vec3> tp, ep;
    double rot = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      tp.push_back(tr.truth[i].translation);
      ep.push_back(tr.estimate[i].translation);
      const double a = rotation_angle_between(tr.truth[i], tr.estimate[i]) * 180.0 / M_PI;
      rot += a * a;
    }
    need(!tr.t.empty(), "no registration epochs");
    st.position = eval_tracking(tr.t, tp, ep, cfg_.tracking.rpe_window);
    st.rotation_rmse_deg = std::sqrt(rot / tr.t.size());
    rep_.estimation = st;
    write_file(dir_ / "logs" / "estimate.csv", [&](std::ostream& os) {
      os << "t,x,y,z,est_x,est_y,est_z\n";
      for (std::size_t i = 0; i < tr.t.size(); ++i)
        os << tr.t[i] << ',' << tp[i].x() << ',' << tp[i].y() << ',' << tp[i].z() << ',' << ep[i].x() << ','
           << ep[i].y() << ',' << ep[i].z() << '\n';
    });
    spdlog::info("estimation: APE RMSE {:.4f} m over {} fixes", st.position.ape_rmse, tr.t.size());
  }

  FlightSimParams flight_params() const {
    FlightSimParams p;
    p.dt = cfg_.tracking.dt;
    p.attitude_tau = cfg_.tracking.attitude_tau;
    p.gains = cfg_.tracking.gains;
    return p;
  }

  void track(const std::string& name, const std::vector<Vec3>& route, double speed) {
    MavSimState s;
    s.position = route.front();
    FlightSimParams p = flight_params();
    std::shared_ptr<EskfOdometry> odo;
    if (cfg_.odometry == OdometrySource::Eskf) {
      odo = std::make_shared<EskfOdometry>(cfg_.estimation, cfg_.seed + 29);
      p.odometry = make_eskf_odometry(odo);
    }
    const FlightLog log = simulate_flight(sample_route(route, speed, 0.5), s, p);
    TrackingRow row;
    row.path = name;
    row.speed = speed;
    row.stats = eval_tracking(log.samples, cfg_.tracking.rpe_window);
    rep_.tracking.push_back(row);
    write_file(dir_ / "logs" / ("track_" + name + "_" + fmt_speed(speed) + ".csv"),
               [&](std::ostream& os) { write_flight_csv(os, log); });
  }

  void fly() {
    // Scan profile: the first planned column's helix, densified as the executor flies it.
    const auto it = std::find_if(tasks_.begin(), tasks_.end(),
                                 [](const auto& t) { return t.target.kind == StructureKind::Column; });
    if (it != tasks_.end()) {
      const ScanPath dense = densify_helix(it->path, it->target.center, 0.3);
      std::vector<Vec3> route;
      for (const auto& w : dense.waypoints) route.push_back(w.position);
      track("scan", route, cfg_.tracking.scan_speed);
    } else {
      rep_.failures.push_back("fly: no column scan path for the scan profile");
    }
    const Vec3 c = cfg_.tracking.curve_center;
    const Vec2 ax = cfg_.tracking.curve_axes;
    std::vector<Vec3> curve;
    for (int k = 0; k <= 72; ++k) {
      const double a = 2.0 * M_PI * k / 72;
      curve.emplace_back(c.x() + ax.x() * std::sin(a), c.y() - ax.y() * std::cos(a), c.z());
    }
    for (double v : cfg_.tracking.speeds) track("curve", curve, v);
  }

  void quality() {
    const auto& q = cfg_.quality;
    NsModel model;
    const std::string path = q.model.empty() ? std::string(MAVI_DATA_DIR) + "/niqe_model.json" : q.model;
    if (fs::exists(path)) {
      model = load_ns_model(path);
    } else {
      if (!q.model.empty()) throw Error("NIQE model not found: " + path);
      spdlog::warn("no NIQE model at {}, fitting one from generated textures", path);
      model = fit_ns_model(render_corpus(32, 128, 1000), q.patch_size, 500, q.C);
    }
    std::vector<GrayImage> images;
    std::vector<std::string> names;
    const int total = q.images + q.corrupted;
    for (int i = 0; i < total; ++i) {
      const bool bad = i >= q.images;
      GrayImage img = render_clean(q.image_size, cfg_.seed * 1000 + 7 + i);
      if (bad) img = gaussian_blur(img, q.blur_sigma);
      images.push_back(std::move(img));
      names.push_back((bad ? "corrupted_" : "capture_") + std::to_string(i) + ".pgm");
    }
    const FilterResult fr = filter_dataset(images, model, q.s_dis);
    QualityStats st;
    st.images = total;
    st.corrupted = q.corrupted;
    for (int i = 0; i < total; ++i) {
      const bool bad = i >= q.images;
      if (!fr.kept[i]) {
        ++st.rejected;
        st.rejected_corrupted += bad;
      }
      (bad ? st.corrupted_mean : st.clean_mean) += fr.scores[i];
    }
    if (q.images) st.clean_mean /= q.images;
    if (q.corrupted) st.corrupted_mean /= q.corrupted;
    rep_.quality = st;
    write_file(dir_ / "logs" / "quality.csv", [&](std::ostream& os) { write_filter_csv(os, names, fr); });
  }

  static void need(bool ok, const char* what) {
    if (!ok) throw Error(what);
  }

  const PipelineConfig& cfg_;
  fs::path dir_;
  EvalReport rep_;
  std::optional<Facility> facility_;
  PointCloud observed_;
  std::optional<Segmentation> seg_;
  std::optional<VoxelGrid> prior_;
  std::vector<InspectionTask> tasks_;
  double floor_z_ = 0.0, roof_z_ = 0.0, h_min_ = 0.0, h_max_ = 0.0;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

std::vector<PlannerRow> run_planner_benchmark(const PipelineConfig& cfg) {
  const auto& b = cfg.benchmark;
  const PlannerParams params = planner_params(cfg);
  std::vector<PlannerRow> rows;
  auto run = [&](double D, bool obstacle) {
    VoxelGrid raw(b.resolution, Aabb{Vec3(-2, -4, -1), Vec3(D + 3, 4, 3)});
    if (obstacle) {
      const Vec3 mid(0.5 * D, 0, 1);
      const Vec3 lo = mid - 0.5 * b.obstacle_size, hi = mid + 0.5 * b.obstacle_size;
      const double r = raw.resolution();
      for (double x = lo.x() + r / 2; x < hi.x(); x += r)
        for (double y = lo.y() + r / 2; y < hi.y(); y += r)
          for (double z = lo.z() + r / 2; z < hi.z(); z += r) {
            const auto key = raw.key_of(Vec3(x, y, z));
            if (raw.in_bounds(key)) raw.set(key, VoxelState::Obstacle);
          }
    }
    const VoxelGrid grid = make_planning_grid(raw, params.weights);
    const PlanResult r = plan_trajectory(Vec3(0, 0, 1), Vec3(D, 0, 1), grid, params);
    PlannerRow row;
    row.scenario = obstacle ? "obstacle" : "free";
    row.obstacle = obstacle;
    row.success = r.success;
    row.distance = r.distance;
    row.length = r.length;
    row.t_gen_ms = r.t_gen_ms;
    row.t_opt_ms = r.t_opt_ms;
    row.t_astar_ms = r.t_astar_ms;
    rows.push_back(row);
  };
  for (double D : b.distances) run(D, false);
  run(b.obstacle_distance, true);
  return rows;
}

void write_planner_csv(std::ostream& os, const std::vector<PlannerRow>& rows) {
  os << "scenario,success,D,L_final,T_G_ms,T_Opt_ms,T_Astar_ms\n";
  for (const auto& r : rows)
    os << r.scenario << ',' << r.success << ',' << r.distance << ',' << r.length << ',' << r.t_gen_ms << ','
       << r.t_opt_ms << ',' << r.t_astar_ms << '\n';
}

json report_to_json(const EvalReport& r, bool with_timing) {
  json j;
  j["profile"] = r.profile;
  j["seed"] = r.seed;
  j["odometry"] = to_string(r.odometry);
  j["stages"] = r.stages;
  j["failures"] = r.failures;
  if (r.columns) {
    const auto& c = *r.columns;
    j["segmentation"]["columns"] = {{"f1", c.f1}, {"precision", c.precision}, {"recall", c.recall},
                                    {"true_positives", c.true_positives}, {"predicted", c.predicted},
                                    {"truth", c.truth}};
  }
  if (r.wall_fraction) {
    j["segmentation"]["wall_fraction"] = *r.wall_fraction;
    j["segmentation"]["walls_extracted"] = r.walls_extracted;
  }
  j["scan_plans"] = json::array();
  for (const auto& s : r.scan_plans)
    j["scan_plans"].push_back({{"id", s.id}, {"kind", to_string(s.kind)}, {"planned", s.planned},
                               {"waypoints", s.waypoints}, {"length", s.length}, {"coverage", s.coverage},
                               {"misses", s.misses}, {"failure", s.failure}});
  j["planner"] = json::array();
  for (const auto& p : r.planner) {
    json row = {{"scenario", p.scenario}, {"success", p.success}, {"D", p.distance}, {"L_final", p.length}};
    // T_A* being zero is a property of the route, so it stays even without timing.
    row["astar_used"] = p.t_astar_ms > 0.0;
    if (with_timing) {
      row["T_G_ms"] = p.t_gen_ms;
      row["T_Opt_ms"] = p.t_opt_ms;
      row["T_Astar_ms"] = p.t_astar_ms;
    }
    j["planner"].push_back(row);
  }
  j["inspection"] = {{"instances", json::array()},
                     {"successes", r.inspection_successes()},
                     {"success_rate", r.inspection_success_rate()},
                     {"mission_time", r.mission_time},
                     {"violations", r.mission_violations}};
  for (const auto& i : r.inspection)
    j["inspection"]["instances"].push_back(
        {{"id", i.id}, {"kind", to_string(i.kind)}, {"success", i.success}, {"unreachable", i.unreachable},
         {"laps", i.laps}, {"alpha_final", i.alpha_final}, {"alpha_monotone", i.alpha_monotone},
         {"violations", i.violations}, {"replaced_waypoints", i.replaced_waypoints}, {"replans", i.replans},
         {"captures", i.captures}, {"planned_length", i.planned_length}, {"flown_length", i.flown_length},
         {"failure", i.failure}});
  if (r.estimation) {
    const auto& e = *r.estimation;
    j["estimation"] = {{"duration", e.duration}, {"updates", e.updates},
                       {"registration_failures", e.registration_failures},
                       {"position", tracking_json(e.position)}, {"rotation_rmse_deg", e.rotation_rmse_deg}};
  }
  j["tracking"] = json::array();
  for (const auto& t : r.tracking) {
    json row = tracking_json(t.stats);
    row["path"] = t.path;
    row["speed"] = t.speed;
    j["tracking"].push_back(row);
  }
  if (r.quality) {
    const auto& q = *r.quality;
    j["quality"] = {{"images", q.images}, {"corrupted", q.corrupted}, {"rejected", q.rejected},
                    {"rejected_corrupted", q.rejected_corrupted}, {"clean_mean", q.clean_mean},
                    {"corrupted_mean", q.corrupted_mean}};
  }
  if (with_timing) j["timing"] = r.timing_ms;
  return j;
}

EvalReport run_pipeline(const PipelineConfig& cfg, const std::string& run_dir, Stage stage) {
  cfg.validate();
  if (stage == Stage::Metrics) return evaluate_run_dir(cfg, run_dir);
  Pipeline p(cfg, run_dir);
  return p.run(stage);
}

EvalReport run_pipeline(const std::string& config_path, const std::string& run_dir, Stage stage) {
  return run_pipeline(load_config(config_path), run_dir, stage);
}

EvalReport evaluate_run_dir(const PipelineConfig& cfg, const std::string& run_dir) {
  const fs::path dir(run_dir);
  EvalReport rep;
  rep.profile = cfg.profile;
  rep.seed = cfg.seed;
  rep.odometry = cfg.odometry;

  const PointCloud truth = read_ply((dir / "scene.ply").string());
  const PointCloud pred = read_ply((dir / "segmented.ply").string());
  if (!truth.has_labels() || !pred.has_labels() || truth.size() != pred.size())
    throw Error("scene.ply and segmented.ply must be labelled and point-aligned");

  std::ifstream in(dir / "instances.json");
  if (!in) throw Error("cannot read instances.json");
  const json inst = json::parse(in);
  std::vector<Vec2> centers;
  for (const auto& c : inst.at("columns")) centers.emplace_back(c.at("center")[0].get<double>(), c.at("center")[1].get<double>());
  rep.columns = eval_f1(centers, truth_column_centers(truth), column_match_distance(cfg.facility));

  StructureInstance walls;
  walls.kind = StructureKind::Wall;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (is_wall_label(pred.labels[i])) walls.indices.push_back(static_cast<int>(i));
  rep.wall_fraction = eval_wall_fraction({walls}, truth);
  rep.walls_extracted = static_cast<int>(inst.at("walls").size());

  std::vector<fs::path> logs;
  if (fs::exists(dir / "logs"))
    for (const auto& e : fs::directory_iterator(dir / "logs")) {
      const std::string n = e.path().filename().string();
      if (n.rfind("track_", 0) == 0 && e.path().extension() == ".csv") logs.push_back(e.path());
    }
  std::sort(logs.begin(), logs.end());
  for (const auto& p : logs) {
    // track_<path>_<speed>.csv
    const std::string stem = p.stem().string();
    const auto a = stem.find('_'), b = stem.rfind('_');
    if (a == b) continue;
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    const auto head = split_csv(line);
    auto col = [&](const char* name) {
      const auto it = std::find(head.begin(), head.end(), name);
      if (it == head.end()) throw Error(p.string() + ": missing column " + name);
      return static_cast<std::size_t>(it - head.begin());
    };
    const std::size_t ct = col("t"), crx = col("ref_x"), cx = col("x");
    std::vector<double> t;
    std::vector<Vec3> ref, exe;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto v = split_csv(line);
      t.push_back(std::stod(v.at(ct)));
      ref.emplace_back(std::stod(v.at(crx)), std::stod(v.at(crx + 1)), std::stod(v.at(crx + 2)));
      exe.emplace_back(std::stod(v.at(cx)), std::stod(v.at(cx + 1)), std::stod(v.at(cx + 2)));
    }
    TrackingRow row;
    row.path = stem.substr(a + 1, b - a - 1);
    row.speed = std::stod(stem.substr(b + 1));
    row.stats = eval_tracking(t, ref, exe, cfg.tracking.rpe_window);
    rep.tracking.push_back(row);
  }
  rep.stages.push_back("metrics");
  write_text(dir / "metrics.json", report_to_json(rep, false).dump(2) + "\n");
  return rep;
}

}  // namespace mavi
