#pragma once

#include <vector>

#include "mavi/geometry/point_cloud.hpp"
#include "mavi/perception/structure.hpp"

namespace mavi {

struct ColumnCriteria {
  double aspect_max = 3.0;
  double footprint_max = 2.0;  // horizontal bounding-box diagonal, m
  double height_min = 0.0;
};

/// Keep clusters shaped like columns: compact, roughly isotropic footprint and
/// tall enough. Radius is the largest horizontal distance to the centroid axis.
std::vector<StructureInstance> classify_columns(const PointCloud& cloud,
                                                const std::vector<std::vector<int>>& clusters,
                                                const ColumnCriteria& criteria = {});

}  // namespace mavi
