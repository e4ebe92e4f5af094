#pragma once

#include <vector>

#include "mavi/planning/camera.hpp"
#include "mavi/planning/scan_path.hpp"
#include "mavi/planning/wall_projection.hpp"

namespace mavi {

struct GridCell {
  int row = 0;
  int col = 0;
  auto operator<=>(const GridCell&) const = default;
};

/// Greedy coverage over the grid: step to the neighbour with the highest value
/// (directions 0..315 deg, first maximum wins), zeroing cells once visited. On
/// a dead end, walk the shortest free-cell path to the nearest unvisited cell,
/// or jump straight to it when no such path exists. Includes the start cell.
std::vector<GridCell> ccpp(const BoundingGridMap& grid, GridCell start);

/// Free cell nearest to the projection of p (row-major tie break).
GridCell nearest_free_cell(const BoundingGridMap& grid, const Vec3& p);

/// Cell centres on the offset plane, yaw facing the wall.
ScanPath grid_path_to_waypoints(const std::vector<GridCell>& path, const BoundingGridMap& grid,
                                int source_id = -1);

}  // namespace mavi
