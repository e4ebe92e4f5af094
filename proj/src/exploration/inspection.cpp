#include "mavi/exploration/inspection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>

#include <spdlog/spdlog.h>

#include "mavi/trajectory/cost.hpp"

namespace mavi {

void InspectionConfig::validate() const {
  if (!(resolution > 0.0)) throw InvalidInput("resolution must be positive");
  if (!(tau > 0.0) || tau > 1.0) throw InvalidInput("tau must lie in (0, 1]");
  if (max_retries < 0 || max_replans < 0) throw InvalidInput("retry counts must be non-negative");
  if (!(monitor_rate_hz > 0.0) || !(scan_speed > 0.0)) throw InvalidInput("rates and speeds must be positive");
  if (!(capture_tolerance > 0.0) || log_every < 1) throw InvalidInput("bad capture tolerance or log stride");
  lidar.validate();
  transit.weights.validate();
}

int InspectionReport::successes() const {
  return static_cast<int>(std::count_if(instances.begin(), instances.end(), [](const auto& r) { return r.success; }));
}

VoxelGrid prior_grid(const PointCloud& cloud, double resolution) {
  VoxelGrid g(resolution);
  for (const auto& p : cloud.points)
    if (p.allFinite()) g.set(g.key_of(p), VoxelState::Obstacle);
  return g;
}

void write_trajectory_csv(std::ostream& os, const std::vector<FlightSample>& samples) {
  os << "t,x,y,z,yaw,ref_x,ref_y,ref_z\n";
  char buf[256];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.5f,%.5f,%.5f,%.5f,%.5f,%.5f,%.5f\n", s.t, s.position.x(), s.position.y(),
                  s.position.z(), s.yaw, s.reference.x(), s.reference.y(), s.reference.z());
    os << buf;
  }
}

namespace {

constexpr double kHelixStep = 0.3;

class Mission {
 public:
  Mission(const World& world, const VoxelGrid& prior, const InspectionConfig& cfg)
      : world_(world), prior_(prior), cfg_(cfg), gt_(world.occupancy(cfg.resolution)), rng_(cfg.seed) {
    sim_.position = cfg.start;
    sim_.yaw = cfg.start_yaw;
    // Known structure, inflated once; task-map knowledge is layered on top.
    prior_inflated_ = VoxelGrid(cfg.resolution);
    for (const auto& [k, s] : prior.cells())
      if (s == VoxelState::Obstacle) prior_inflated_.set(k, VoxelState::Obstacle);
    prior_inflated_.inflate(planning_inflation(prior_inflated_, cfg.transit.weights));
  }

  InspectionReport run(const std::vector<InspectionTask>& tasks) {
    for (const auto& task : tasks) {
      report_.instances.emplace_back();
      cur_ = &report_.instances.back();
      cur_->id = task.target.id;
      cur_->kind = task.target.kind;
      try {
        run_task(task);
      } catch (const Error& e) {
        cur_->success = false;
        if (cur_->failure.empty()) cur_->failure = e.what();
      }
      cur_->alpha_final = alpha_;
      spdlog::info("instance {}: success={} alpha={:.3f} laps={} violations={}{}", cur_->id, cur_->success, alpha_,
                   cur_->laps, cur_->violations, cur_->failure.empty() ? "" : " (" + cur_->failure + ")");
    }
    report_.mission_time = clock_;
    return std::move(report_);
  }

 private:
  enum class Outcome { Done, Blocked };

  VoxelGrid planning_grid() const {
    VoxelGrid g = prior_inflated_;
    VoxelGrid fresh(cfg_.resolution);
    for (const auto& [k, s] : task_->cells()) {
      if (s != VoxelState::Obstacle) continue;
      if (!prior_.is_obstacle(k)) fresh.set(k, VoxelState::Obstacle);
    }
    fresh.inflate(planning_inflation(fresh, cfg_.transit.weights));
    for (const auto& [k, s] : fresh.cells()) {
      const auto cur = g.state(k);
      if (!cur || (s == VoxelState::Obstacle && *cur != VoxelState::Obstacle)) g.set(k, s);
    }
    for (const auto& [k, s] : task_->cells())
      if (s == VoxelState::Free && !g.is_known(k)) g.set(k, VoxelState::Free);
    return g;
  }

  void scan() {
    const Vec3 origin = sim_.position;
    if (!task_->in_bounds(task_->key_of(origin))) return;
    const PointCloud pc = simulate_scan(world_, origin, sim_.yaw, cfg_.lidar, &rng_);
    task_->raycast_update(origin, pc);
    const double a = exploration_rate(*task_, roi_);
    if (a < alpha_ - 1e-12) cur_->alpha_monotone = false;
    alpha_ = a;
  }

  // Clearance of the remaining control points against newly observed obstacles.
  bool path_blocked(const BSplineTrajectory& traj, double t) const {
    const double thr = cfg_.transit.weights.safe_distance - cfg_.resolution;
    const std::size_t first = std::min(traj.control.size(), static_cast<std::size_t>(std::max(0.0, t / traj.dt)));
    for (std::size_t i = first; i < traj.control.size(); ++i) {
      const EscapeInfo e = nearest_obstacle(*task_, traj.control[i], thr);
      if (e.active && !prior_.is_obstacle(task_->key_of(e.p))) return true;
    }
    return false;
  }

  template <class OnSample>
  Outcome fly(const BSplineTrajectory& traj, double scan_rate, std::function<double(double)> yaw, OnSample&& on_sample) {
    FlightSimParams p = cfg_.flight;
    p.yaw = std::move(yaw);
    if (cfg_.odometry) p.odometry = [this](const MavSimState& s, double) { return cfg_.odometry(s, clock_); };
    FlightStepper stepper(traj, sim_, p);
    const double period = 1.0 / scan_rate;
    while (!stepper.done()) {
      FlightSample fs = stepper.step();
      fs.t = clock_;
      sim_ = stepper.state();
      clock_ += p.dt;
      if (gt_.is_obstacle(gt_.key_of(fs.position))) {
        ++cur_->violations;
        ++report_.violations;
      }
      if (sample_count_++ % cfg_.log_every == 0) report_.trajectory.push_back(fs);
      on_sample(fs);
      if (clock_ + 1e-9 >= next_scan_) {
        next_scan_ = clock_ + period;
        scan();
        if (path_blocked(traj, stepper.time())) return Outcome::Blocked;
      }
    }
    return Outcome::Done;
  }

  // A plan the MAV can fly: optimizer success, or a clearance failure caused
  // only by the fixed start points when the MAV is already close to something.
  bool usable(const PlanResult& res, const VoxelGrid& grid) const {
    if (res.success) return true;
    if (res.traj.control.empty() || !res.opt.audit.dynamics_ok) return false;
    const auto& w = cfg_.transit.weights;
    const auto& c = res.traj.control;
    for (std::size_t i = res.traj.degree + 1; i < c.size(); ++i) {
      const EscapeInfo e = nearest_obstacle(grid, c[i], w.safe_distance);
      if (e.active) return false;
    }
    return true;
  }

  bool move_to(const Waypoint& goal, double* distance) {
    for (int attempt = 0; attempt <= cfg_.max_replans; ++attempt) {
      if ((sim_.position - goal.position).norm() < 0.05) return true;
      const VoxelGrid grid = planning_grid();
      const PlanResult res = plan_trajectory(sim_.position, goal.position, grid, cfg_.transit);
      if (!usable(res, grid)) return false;
      Vec3 last = sim_.position;
      const double yaw = goal.yaw;
      const Outcome out = fly(res.traj, cfg_.lidar.rate_hz, [yaw](double) { return yaw; }, [&](const FlightSample& s) {
        if (distance) *distance += (s.position - last).norm();
        last = s.position;
      });
      if (out == Outcome::Done) return true;
      ++cur_->replans;
    }
    return false;
  }

  void explore(const InspectionTask& task) {
    for (int attempt = 0; attempt <= cfg_.max_retries && alpha_ < cfg_.tau; ++attempt) {
      const VoxelGrid grid = planning_grid();
      std::vector<Waypoint> goals = gen_exploration_goals(task.target, attempt, grid, cfg_.goals);
      // Start the lap at the goal nearest the MAV.
      std::size_t near = 0;
      for (std::size_t i = 1; i < goals.size(); ++i)
        if ((goals[i].position - sim_.position).norm() < (goals[near].position - sim_.position).norm()) near = i;
      if (task.target.kind == StructureKind::Column) {
        std::rotate(goals.begin(), goals.begin() + near, goals.end());
      } else if (near + 1 == goals.size() && goals.size() > 1) {
        std::reverse(goals.begin(), goals.end());
      }
      for (const auto& g : goals)
        if (!move_to(g, &cur_->exploration_distance)) spdlog::debug("instance {}: skipped unreachable goal", cur_->id);
      cur_->alpha_history.push_back(alpha_);
      cur_->laps = attempt + 1;
    }
  }

  void run_task(const InspectionTask& task) {
    task.path.validate();
    const auto& sf = cfg_.transit.weights.safe_distance;
    // Spiral legs follow the helix, not the chord through the column.
    ScanPath flight_path = task.path;
    std::vector<int> flight_src(task.path.size());
    for (std::size_t i = 0; i < flight_src.size(); ++i) flight_src[i] = static_cast<int>(i);
    if (task.path.kind == ScanPathKind::Spiral && task.target.kind == StructureKind::Column)
      flight_path = densify_helix(task.path, task.target.center, kHelixStep, &flight_src);
    roi_ = region_of_interest(flight_path, cfg_.resolution, sf, &prior_);
    Aabb box;
    box.min = box.max = task.path.waypoints.front().position;
    for (const auto& w : task.path.waypoints) {
      box.min = box.min.cwiseMin(w.position);
      box.max = box.max.cwiseMax(w.position);
    }
    box.min.array() -= cfg_.map_margin;
    box.max.array() += cfg_.map_margin;
    if (!world_.empty()) {
      const Aabb wb = world_.bounds();
      box.min = box.min.cwiseMax(wb.min);
      box.max = box.max.cwiseMin(wb.max);
    }
    task_map_ = std::make_unique<VoxelGrid>(cfg_.resolution, box);
    task_ = task_map_.get();
    alpha_ = exploration_rate(*task_, roi_);
    next_scan_ = clock_;

    explore(task);

    const VoxelGrid grid = planning_grid();
    ReplanResult rp = check_and_replan(grid, flight_path, cfg_.transit.astar);
    if (!rp.ok) {
      cur_->unreachable = true;
      cur_->failure = rp.failure;
      return;
    }
    for (int& s : rp.source)
      if (s >= 0) s = flight_src[s];
    execute(task, std::move(rp));
  }

  void execute(const InspectionTask& task, ReplanResult rp) {
    const auto& ref = task.path.waypoints;
    const std::size_t n = ref.size();
    cur_->replaced_waypoints = rp.blocked;
    cur_->planned_scan_length = rp.path.length();
    if (!move_to(rp.path.waypoints.front(), nullptr)) {
      cur_->unreachable = true;
      cur_->failure = "cannot reach the start of the scan path";
      return;
    }

    std::vector<char> required(n, 0);
    for (int s : rp.source)
      if (s >= 0) required[s] = 1;
    std::vector<CapturePose> best(n);
    for (std::size_t i = 0; i < n; ++i) {
      best[i].waypoint = static_cast<int>(i);
      best[i].pose = ref[i];
      best[i].error = std::numeric_limits<double>::infinity();
    }

    PlannerParams params = cfg_.transit;
    params.cruise_speed = cfg_.scan_speed;
    params.optimize_feasible = false;

    ScanPath route = rp.path;
    std::vector<int> source = rp.source;
    bool planned_ok = false;
    for (int attempt = 0; attempt <= cfg_.max_replans; ++attempt) {
      const VoxelGrid grid = planning_grid();
      std::vector<Vec3> pts;
      if ((sim_.position - route.waypoints.front().position).norm() > 1e-3) pts.push_back(sim_.position);
      for (const auto& w : route.waypoints) pts.push_back(w.position);
      if (pts.size() < 2) pts.push_back(pts.front());
      const PlanResult res = plan_route(pts, grid, params);
      if (!usable(res, grid)) {
        cur_->failure = "scan path planning failed: " + res.failure;
        return;
      }
      planned_ok = true;
      std::size_t progress = 0;
      const auto& wps = route.waypoints;
      auto yaw = [&](double t) {
        const Vec3 p = res.traj.position(std::min(t, res.traj.duration()));
        std::size_t best_i = progress;
        double best_d = (wps[progress].position - p).squaredNorm();
        for (std::size_t i = progress + 1; i < std::min(wps.size(), progress + 12); ++i) {
          const double d = (wps[i].position - p).squaredNorm();
          if (d < best_d) best_d = d, best_i = i;
        }
        progress = best_i;
        return wps[progress].yaw;
      };
      Vec3 last = sim_.position;
      const Outcome out = fly(res.traj, cfg_.monitor_rate_hz, yaw, [&](const FlightSample& s) {
        cur_->scan_length += (s.position - last).norm();
        last = s.position;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = (s.position - ref[i].position).norm();
          if (d < best[i].error) {
            best[i].error = d;
            best[i].pose.position = s.position;
            best[i].pose.yaw = s.yaw;
          }
        }
      });
      if (out == Outcome::Done) break;
      ++cur_->replans;
      planned_ok = false;
      // Repair what is left of the path against the updated map.
      ScanPath rest;
      rest.kind = route.kind;
      rest.source_id = route.source_id;
      std::vector<int> rest_src;
      for (std::size_t i = progress; i < wps.size(); ++i) {
        rest.waypoints.push_back(wps[i]);
        rest_src.push_back(source[i]);
      }
      for (std::size_t i = progress; i < source.size(); ++i)
        if (source[i] >= 0) required[source[i]] = 0;
      if (rest.waypoints.size() < 2) {
        planned_ok = true;
        break;
      }
      const ReplanResult again = check_and_replan(planning_grid(), rest, cfg_.transit.astar);
      if (!again.ok) {
        cur_->failure = "replanning the scan path failed: " + again.failure;
        return;
      }
      route = again.path;
      source.clear();
      for (int s : again.source) source.push_back(s >= 0 ? rest_src[s] : -1);
      for (int s : source)
        if (s >= 0) required[s] = 1;
    }
    cur_->executed_path = route;

    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!required[i]) continue;
      best[i].reached = best[i].error <= cfg_.capture_tolerance;
      all = all && best[i].reached;
      cur_->captures.push_back(best[i]);
    }
    if (!planned_ok && cur_->failure.empty()) cur_->failure = "scan path still blocked after replanning";
    if (!all && cur_->failure.empty()) cur_->failure = "missed capture waypoints";
    if (cur_->violations > 0 && cur_->failure.empty()) cur_->failure = "entered ground-truth obstacle voxels";
    cur_->success = planned_ok && all && cur_->violations == 0;
  }

  const World& world_;
  const VoxelGrid& prior_;
  const InspectionConfig& cfg_;
  VoxelGrid gt_;
  VoxelGrid prior_inflated_{1.0};
  std::mt19937_64 rng_;
  MavSimState sim_;
  double clock_ = 0.0;
  double next_scan_ = 0.0;
  long sample_count_ = 0;
  InspectionReport report_;

  InstanceReport* cur_ = nullptr;
  std::unique_ptr<VoxelGrid> task_map_;
  VoxelGrid* task_ = nullptr;
  std::vector<VoxelKey> roi_;
  double alpha_ = 0.0;
};

}  // namespace

InspectionReport run_inspection(const std::vector<InspectionTask>& tasks, const World& world, const VoxelGrid& prior,
                                const InspectionConfig& cfg) {
  cfg.validate();
  if (std::abs(prior.resolution() - cfg.resolution) > 1e-12)
    throw InvalidInput("prior grid must use the inspection resolution");
  Mission m(world, prior, cfg);
  return m.run(tasks);
}

}  // namespace mavi
