#pragma once

#include <optional>
#include <vector>

#include "mavi/geometry/voxel_grid.hpp"

namespace mavi {

struct AStarOptions {
  bool unknown_is_free = true;
  bool inflated_is_free = false;
  int max_expansions = 400000;
  std::optional<Aabb> bounds;  // defaults to the grid bounds, else a box around the endpoints
  double box_margin = 6.0;
};

bool voxel_passable(const VoxelGrid& grid, const VoxelKey& k, const AStarOptions& opts);

/// True when every voxel crossed by the segment is passable. With
/// `skip_start` the voxel containing `a` is not checked.
bool segment_free(const VoxelGrid& grid, const Vec3& a, const Vec3& b, const AStarOptions& opts,
                  bool skip_start = false);

struct AStarResult {
  bool found = false;
  std::vector<Vec3> path;  // start, voxel centres..., goal
  int expansions = 0;
};

/// 26-connected A* over voxel centres. The start voxel may be blocked.
AStarResult astar(const VoxelGrid& grid, const Vec3& start, const Vec3& goal,
                  const AStarOptions& opts = {});

/// Greedy line-of-sight shortcutting.
std::vector<Vec3> shortcut_path(const std::vector<Vec3>& path, const VoxelGrid& grid,
                                const AStarOptions& opts);

}  // namespace mavi
