#pragma once

#include <vector>

#include "mavi/geometry/voxel_grid.hpp"
#include "mavi/trajectory/bspline.hpp"

namespace mavi {

struct DynamicLimits {
  double v_max = 2.5;
  double a_max = 3.0;
  double j_max = 4.0;
};

struct OptWeights {
  double lambda_c = 10.0;
  double lambda_s = 1.0;
  double lambda_d = 1.0;
  double w_v = 1.0;
  double w_a = 1.0;
  double w_j = 1.0;
  double safe_distance = 0.5;  // S_f
  DynamicLimits limits;
  // Literal piecewise collision cost, with the negative middle band and the
  // jump at 1.5 S_f. Off by default.
  bool literal_collision = false;

  void validate() const;
};

/// Obstacle point p and unit escape direction v for one control point.
struct EscapeInfo {
  bool active = false;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::UnitZ();
};

/// |(Q - p) . v|
double collision_distance(const Vec3& q, const Vec3& p, const Vec3& v);

/// Collision penalty and its derivative with respect to d.
/// Default: 0 above 1.5 S_f, 3 (1.5 S_f - d)^2 on (S_f, 1.5 S_f],
/// (S_f - d)^3 + 3 S_f (S_f - d) + 0.75 S_f^2 at or below S_f (C1 throughout).
struct ScalarCost {
  double value = 0.0;
  double deriv = 0.0;
};
ScalarCost collision_cost(double d, double safe_distance, bool literal = false);

/// Feasibility penalty on a derivative vector c with limit c_m:
/// 0 for |c| <= c_m, (|c| - c_m)^3 below 2 c_m, |c|^2 from 2 c_m on.
double feasibility_penalty(const Vec3& c, double c_m, Vec3* grad = nullptr);

/// Nearest obstacle voxel (state Obstacle) within `radius` of q, as the
/// closest point on its box. Inactive when none is in range.
EscapeInfo nearest_obstacle(const VoxelGrid& grid, const Vec3& q, double radius);
std::vector<EscapeInfo> compute_escape_info(const BSplineTrajectory& traj, const VoxelGrid& grid,
                                            double radius);

struct CostTerms {
  double total = 0.0;
  double collision = 0.0;   // sum J_c
  double smoothness = 0.0;  // J_s
  double feasibility = 0.0; // J_d
};

/// J = lambda_c sum J_c + lambda_s J_s + lambda_d J_d; gradient w.r.t. every
/// control point when `grad` is non-null.
CostTerms cost_and_grad(const BSplineTrajectory& traj, const std::vector<EscapeInfo>& escape,
                        const OptWeights& w, std::vector<Vec3>* grad = nullptr);

}  // namespace mavi
