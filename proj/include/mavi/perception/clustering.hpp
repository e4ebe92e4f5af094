#pragma once

#include <span>
#include <vector>

#include "mavi/geometry/types.hpp"

namespace mavi {

/// Connected components of the graph joining points closer than `d_thresh`.
/// Clusters are ordered by their smallest index; indices are sorted.
std::vector<std::vector<int>> cluster_euclidean(std::span<const Vec3> points, double d_thresh);

}  // namespace mavi
