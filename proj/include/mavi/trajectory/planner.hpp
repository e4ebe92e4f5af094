#pragma once

#include <string>
#include <vector>

#include "mavi/trajectory/astar.hpp"
#include "mavi/trajectory/optimizer.hpp"

namespace mavi {

struct PlannerParams {
  double cruise_speed = 1.0;
  OptWeights weights;
  OptimizerOptions optimizer;
  AStarOptions astar;
  // When false, an initial curve that already passes the clearance and
  // dynamics audit is kept as is (scan paths keep their exact geometry).
  bool optimize_feasible = true;
};

struct PlanResult {
  bool success = false;
  BSplineTrajectory traj;
  std::vector<Vec3> route;  // polyline the control points were sampled from
  double t_gen_ms = 0.0;    // initial path generation
  double t_opt_ms = 0.0;
  double t_astar_ms = 0.0;  // exactly 0 when the direct route is clear
  double distance = 0.0;    // straight-line start-goal distance
  double length = 0.0;      // arc length of the final curve
  OptimizeResult opt;
  std::string failure;
};

/// Copy of `grid` with obstacles inflated by S_f + 2 r, so that any point of
/// a free voxel keeps more than S_f to obstacle surfaces.
VoxelGrid make_planning_grid(const VoxelGrid& grid, const OptWeights& w);
double planning_inflation(const VoxelGrid& grid, const OptWeights& w);

/// Control points along a polyline with a speed ramp at both ends, spaced at
/// most cruise_speed * dt. Starts and ends at rest.
BSplineTrajectory sample_route(const std::vector<Vec3>& route, double cruise_speed, double dt);

/// Plan from start to goal. `planning_grid` must come from make_planning_grid
/// (blocked = obstacle or inflated); clearance is scored against its obstacles.
PlanResult plan_trajectory(const Vec3& start, const Vec3& goal, const VoxelGrid& planning_grid,
                           const PlannerParams& params = {});

/// Same, through a sequence of waypoints (route kept when segments are clear).
PlanResult plan_route(const std::vector<Vec3>& waypoints, const VoxelGrid& planning_grid,
                      const PlannerParams& params = {});

}  // namespace mavi
