#pragma once

#include <vector>

#include "mavi/perception/columns.hpp"
#include "mavi/perception/csf.hpp"
#include "mavi/perception/walls.hpp"

namespace mavi {

struct RoofParams {
  double angle_tol = 10.0 * 3.14159265358979323846 / 180.0;
  double dist_thresh = 0.1;
  int max_planes = 5;
  int min_inliers = 50;
  double normal_angle = 3.14159265358979323846 / 4.0;  // used when the cloud has normals
  std::uint64_t seed = 13;
};

/// Horizontal-ish plane facing the ground (N_r . N_g <= -cos(angle_tol)) with
/// the greatest height along N_g. Indices refer to `cloud`. Throws when none.
StructureInstance extract_roof(const PointCloud& cloud, std::span<const int> indices,
                               const Vec3& ground_normal, const RoofParams& params = {});

struct SegmentationParams {
  CsfParams csf;
  RoofParams roof;
  ColumnCriteria columns;
  double column_height_fraction = 0.5;
  WallParams walls;
  double cluster_dist = 0.3;
  // Points whose normal deviates more than this from the ground/roof normal are
  // given back to the remainder. Ignored when the cloud has no normals.
  double surface_normal_angle = 3.14159265358979323846 / 4.0;
};

struct Segmentation {
  StructureInstance ground;
  StructureInstance roof;
  std::vector<StructureInstance> columns;
  std::vector<StructureInstance> walls;
  std::vector<int> unassigned;

  /// Per-point label: 0 ground, 1 roof, 2 column, 3 wall, -1 none.
  std::vector<int> labels(std::size_t n) const;
  /// Per-point instance id (columns and walls numbered from 0), -1 otherwise.
  std::vector<int> instance_ids(std::size_t n) const;
};

Segmentation segment_structures(const PointCloud& cloud, const SegmentationParams& params = {});

}  // namespace mavi
