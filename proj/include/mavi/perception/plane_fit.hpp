#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "mavi/perception/structure.hpp"

namespace mavi {

struct RansacOptions {
  int max_iterations = 1000;
  double confidence = 0.999;
  std::uint64_t seed = 42;
  // When set, hypotheses whose normal is further than `max_axis_angle`
  // (radians) from ±axis are discarded.
  std::optional<Vec3> axis;
  double max_axis_angle = 0.0;
};

/// Least-squares plane through the given points (smallest principal axis).
/// Throws InvalidInput for fewer than 3 points or a collinear set.
Plane fit_plane_least_squares(std::span<const Vec3> points);

/// RANSAC plane with least-squares refinement over the inliers. Inlier indices
/// refer to `points`. The normal is oriented into the +z hemisphere.
Plane fit_plane_ransac(std::span<const Vec3> points, double dist_thresh,
                       const RansacOptions& opts = {});

/// Flip n into the +z hemisphere (ties broken on x, then y).
void orient_up(Plane& plane);

}  // namespace mavi
