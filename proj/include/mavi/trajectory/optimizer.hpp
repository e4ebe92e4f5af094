#pragma once

#include <string>

#include "mavi/trajectory/cost.hpp"

namespace mavi {

struct OptimizerOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-4;
  int refresh_every = 10;  // escape info refresh period (iterations)
  // When dynamic limits are still exceeded after descent, stretch dt until
  // they hold. Positions (and so clearances) are unchanged by this.
  bool retime = true;
};

struct TrajectoryAudit {
  double min_distance = 0.0;  // to the nearest obstacle voxel, over control points
  double max_v = 0.0, max_a = 0.0, max_j = 0.0;
  bool collision_ok = false;
  bool dynamics_ok = false;
};

TrajectoryAudit audit_trajectory(const BSplineTrajectory& traj, const VoxelGrid& grid,
                                 const OptWeights& w);

struct OptimizeResult {
  BSplineTrajectory traj;
  int iterations = 0;
  bool converged = false;
  bool retimed = false;
  double cost = 0.0;
  TrajectoryAudit audit;
  std::string report;  // empty when all constraints hold
};

/// Quasi-Newton descent on the free control points; the first and last
/// `degree` points stay fixed.
OptimizeResult optimize(const BSplineTrajectory& traj, const VoxelGrid& grid, const OptWeights& w,
                        const OptimizerOptions& opts = {});

}  // namespace mavi
