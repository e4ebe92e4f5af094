#include "mavi/trajectory/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mavi {

namespace {

constexpr double kKnotSpan = 0.5;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 point_at(const std::vector<Vec3>& route, const std::vector<double>& cum, double s) {
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t k = std::clamp<std::size_t>(it - cum.begin(), 1, route.size() - 1);
  const double seg = cum[k] - cum[k - 1];
  const double t = seg > 0 ? std::clamp((s - cum[k - 1]) / seg, 0.0, 1.0) : 0.0;
  return route[k - 1] + t * (route[k] - route[k - 1]);
}

}  // namespace

double planning_inflation(const VoxelGrid& grid, const OptWeights& w) {
  return w.safe_distance + 2.0 * grid.resolution();
}

VoxelGrid make_planning_grid(const VoxelGrid& grid, const OptWeights& w) {
  VoxelGrid g = grid;
  g.inflate(planning_inflation(grid, w));
  return g;
}

BSplineTrajectory sample_route(const std::vector<Vec3>& route, double cruise_speed, double dt) {
  if (route.empty()) throw InvalidInput("empty route");
  if (!(cruise_speed > 0.0) || !(dt > 0.0)) throw InvalidInput("cruise speed and dt must be positive");
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < route.size(); ++i) cum.push_back(cum.back() + (route[i] - route[i - 1]).norm());
  const double L = cum.back();
  if (L < 1e-9) return BSplineTrajectory::clamped({route.front()}, dt);

  // Spacing pattern in units of the cruise step: ramp up, cruise, ramp down.
  static constexpr double kRamp[] = {0.25, 0.5, 0.75};
  const double ds = cruise_speed * dt;
  const int cruise = std::max(0, static_cast<int>(std::ceil(L / ds - 3.0 - 1e-9)));
  const double step = L / (3.0 + cruise);
  std::vector<double> gaps;
  for (double f : kRamp) gaps.push_back(f * step);
  for (int k = 0; k < cruise; ++k) gaps.push_back(step);
  for (int k = 2; k >= 0; --k) gaps.push_back(kRamp[k] * step);

  std::vector<Vec3> pts{route.front()};
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
    s += gaps[k];
    pts.push_back(point_at(route, cum, s));
  }
  pts.push_back(route.back());
  return BSplineTrajectory::clamped(pts, dt);
}

PlanResult plan_route(const std::vector<Vec3>& waypoints, const VoxelGrid& grid, const PlannerParams& params) {
  PlanResult res;
  if (waypoints.size() < 2) throw InvalidInput("a route needs at least two waypoints");
  res.distance = (waypoints.back() - waypoints.front()).norm();

  res.route.push_back(waypoints.front());
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Vec3& a = res.route.back();
    const Vec3& b = waypoints[i];
    if (segment_free(grid, a, b, params.astar, i == 1)) {
      res.route.push_back(b);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    AStarResult found = astar(grid, a, b, params.astar);
    std::vector<Vec3> piece;
    if (found.found) piece = shortcut_path(found.path, grid, params.astar);
    res.t_astar_ms += ms_since(t0);
    if (!found.found) {
      res.failure = "no collision-free route";
      return res;
    }
    res.route.insert(res.route.end(), piece.begin() + 1, piece.end());
  }

  auto t1 = std::chrono::steady_clock::now();
  const BSplineTrajectory init = sample_route(res.route, params.cruise_speed, kKnotSpan);
  res.t_gen_ms = ms_since(t1);

  t1 = std::chrono::steady_clock::now();
  bool keep = false;
  if (!params.optimize_feasible) {
    const TrajectoryAudit audit = audit_trajectory(init, grid, params.weights);
    if (audit.collision_ok && audit.dynamics_ok) {
      res.opt.traj = init;
      res.opt.audit = audit;
      res.opt.converged = true;
      keep = true;
    }
  }
  if (!keep) res.opt = optimize(init, grid, params.weights, params.optimizer);
  res.t_opt_ms = ms_since(t1);
  res.traj = res.opt.traj;
  res.length = res.traj.arc_length();
  res.success = res.opt.report.empty();
  if (!res.success) res.failure = res.opt.report;
  return res;
}

PlanResult plan_trajectory(const Vec3& start, const Vec3& goal, const VoxelGrid& grid, const PlannerParams& params) {
  return plan_route({start, goal}, grid, params);
}

}  // namespace mavi
