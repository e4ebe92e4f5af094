#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mavi/geometry/point_cloud.hpp"
#include "mavi/geometry/voxel_grid.hpp"
#include "mavi/perception/structure.hpp"
#include "mavi/planning/camera.hpp"

namespace mavi {

inline constexpr double kObstacleValue = -1000.0;

/// Grid over the wall's minimum bounding rectangle, lifted onto the plane
/// offset by D toward the free side. Column j (0-based here) runs along `u`,
/// row i along `v`. Free cells hold 50/(j+1), obstacle cells -1000.
struct BoundingGridMap {
  int rows = 0;
  int cols = 0;
  double cell = 1.0;
  std::vector<double> values;  // row-major
  Vec3 origin = Vec3::Zero();  // rectangle corner on the offset plane
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitZ();
  Vec3 normal = Vec3::UnitY();  // points from the wall toward the camera
  double offset = 0.0;

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < rows && j < cols; }
  bool is_free(int i, int j) const { return in_range(i, j) && at(i, j) > kObstacleValue; }
  int free_count() const;

  Vec3 cell_center(int i, int j) const;
  /// Row/column of the cell containing the projection of p.
  std::pair<int, int> cell_of(const Vec3& p) const;
};

/// Value per Initialize_map for a free cell in 0-based column j.
inline double free_cell_value(int j) { return 50.0 / (j + 1); }

struct WallProjectionOptions {
  double cell_size = 0.0;           // 0: min(FOV_w, FOV_h)
  const VoxelGrid* task_map = nullptr;
  std::optional<Vec3> interior_point;  // fallback free-side hint
};

BoundingGridMap project_wall(const PointCloud& cloud, const StructureInstance& wall,
                             const CameraModel& cam, const WallProjectionOptions& opts = {});

/// ASCII PGM: obstacle black, free cells scaled by value.
void write_grid_pgm(std::ostream& os, const BoundingGridMap& grid);

}  // namespace mavi
