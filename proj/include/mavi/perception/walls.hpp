#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mavi/geometry/point_cloud.hpp"
#include "mavi/perception/structure.hpp"

namespace mavi {

struct WallParams {
  double dist_thresh = 0.1;
  double normal_angle = 0.35;   // inlier normal tolerance, radians
  double kappa = 1.0;           // weight of the normal-consistency term
  double vertical_max = 0.2;    // |n_z| limit for a wall
  int min_inliers = 200;
  double component_gap = 0.3;   // inliers further apart split into separate walls
  int hypotheses = 300;
  int max_rounds = 64;
  std::uint64_t seed = 7;
};

/// Minimiser of  n^T A n - kappa b^T n  over unit vectors n. With A the
/// scatter of inlier positions and b the sum of their normals this is the
/// plane-distance objective plus a soft penalty kappa * sum(1 - n_i . n).
Vec3 solve_constrained_normal(const Mat3& A, const Vec3& b, double kappa);

/// Joint fit over `indices`: returns the plane and the two objective terms.
struct WallFit {
  Plane plane;
  double distance_term = 0.0;  // sum (n.p + d)^2
  double normal_term = 0.0;    // sum (1 - n_i . n)
};
/// Normals facing away from `align` (when given) are flipped first.
WallFit fit_wall_plane(const PointCloud& cloud, std::span<const int> indices, double kappa,
                       const std::optional<Vec3>& align = std::nullopt);

/// Sequentially extract near-vertical planes. Normals are estimated when the
/// cloud has none. `indices` restricts the input (empty span = all points).
std::vector<StructureInstance> extract_wall_planes(const PointCloud& cloud,
                                                   const WallParams& params = {},
                                                   std::span<const int> indices = {});

}  // namespace mavi
