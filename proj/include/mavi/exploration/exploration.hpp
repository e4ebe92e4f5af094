#pragma once

#include <string>
#include <vector>

#include "mavi/geometry/voxel_grid.hpp"
#include "mavi/perception/structure.hpp"
#include "mavi/planning/camera.hpp"
#include "mavi/planning/scan_path.hpp"
#include "mavi/planning/wall_projection.hpp"
#include "mavi/trajectory/astar.hpp"

namespace mavi {

/// What an exploration lap circles: a column (axis and radius) or a wall
/// (centre of its surface, horizontal direction along it, horizontal normal
/// toward the free side, width).
struct ExplorationTarget {
  int id = -1;
  StructureKind kind = StructureKind::Column;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  Vec3 wall_center = Vec3::Zero();
  Vec3 wall_along = Vec3::UnitX();
  Vec3 wall_normal = Vec3::UnitY();
  double wall_width = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
};

ExplorationTarget column_target(int id, const Vec2& center, double radius, double h_min, double h_max);
/// From the wall's bounding grid; the height band is the grid's vertical span.
ExplorationTarget wall_target(int id, const BoundingGridMap& grid);

struct GoalParams {
  int goals_per_column = 6;
  double margin = 0.5;             // beyond the scan path
  CameraModel camera;              // D and FOV for spacing and ΔH
  double min_altitude = 0.0;
  double max_altitude = 1e9;
  double relocation_max = 1.0;     // outward search for goals in blocked voxels
};

/// Height offset of a lap, in units of ΔH: 0, -1, +1, -2, +2, ...
int height_shift_steps(int attempt);

/// Lap goals facing the target. Columns: k goals on a circle of radius
/// r + D + margin; walls: goals every FOV_w along the free side at D + margin.
/// Goals in blocked voxels of `grid` are pushed outward, then dropped.
/// Throws Error when every goal is blocked.
std::vector<Waypoint> gen_exploration_goals(const ExplorationTarget& target, int attempt,
                                            const VoxelGrid& grid, const GoalParams& params = {});

/// Voxels whose centres lie within `dilation` of the path polyline, sorted.
/// Obstacle voxels of `exclude` (known structure) are left out.
std::vector<VoxelKey> region_of_interest(const ScanPath& path, double resolution, double dilation,
                                         const VoxelGrid* exclude = nullptr);

/// Known fraction of the region; 1 when it is empty.
double exploration_rate(const VoxelGrid& task_map, const std::vector<VoxelKey>& roi);

/// Spiral path with extra points on the helix between consecutive waypoints
/// (counter-clockwise about `center`), at most `max_step` apart. `source`
/// receives the input index per output point, -1 for inserted ones.
ScanPath densify_helix(const ScanPath& path, const Vec2& center, double max_step, std::vector<int>* source = nullptr);

struct ReplanResult {
  bool ok = false;
  ScanPath path;
  std::vector<int> source;  // per output waypoint: input index, or -1 when inserted
  int blocked = 0;          // input waypoints that were replaced
  std::string failure;
};

/// Replaces every maximal run of waypoints in blocked voxels (state 1 or 2)
/// with A* voxel centres between the neighbouring free waypoints. A* uses
/// observed free voxels first and falls back to treating unknown as free.
ReplanResult check_and_replan(const VoxelGrid& grid, const ScanPath& path, const AStarOptions& opts = {});

}  // namespace mavi
