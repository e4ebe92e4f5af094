#pragma once

#include <vector>

#include "mavi/geometry/point_cloud.hpp"

namespace mavi {

/// PCA normals from the k nearest neighbours, flipped toward `viewpoint`.
std::vector<Vec3> estimate_normals(const PointCloud& cloud, int k, const Vec3& viewpoint);

}  // namespace mavi
