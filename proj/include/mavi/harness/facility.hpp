#pragma once

#include <cstdint>
#include <vector>

#include "mavi/exploration/world.hpp"
#include "mavi/geometry/point_cloud.hpp"

namespace mavi {

/// Columns on a rows x cols grid centred in the hall.
struct ColumnGridSpec {
  int rows = 2;
  int cols = 3;
  double radius = 0.3;
  double spacing_x = 5.0;
  double spacing_y = 4.0;
  int count() const { return rows * cols; }
};

/// Free-standing partition wall from a to b, floor to roof. Both faces are
/// sampled.
struct PartitionSpec {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double thickness = 0.2;
};

/// Solid box present in the world but absent from the scanned cloud.
struct ObstacleSpec {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

struct FacilitySpec {
  double length = 20.0;  // x
  double width = 12.0;   // y
  double height = 4.0;
  ColumnGridSpec columns;
  std::vector<PartitionSpec> partitions;
  std::vector<ObstacleSpec> obstacles;
  double noise_sigma = 0.0;
  double point_spacing = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
  static FacilitySpec desk();
  static FacilitySpec full();
};

/// Per-point truth labels in the generated cloud.
inline constexpr int kGroundLabel = 0;
inline constexpr int kRoofLabel = 1;
inline constexpr int kWallLabelBase = 100;
inline constexpr int kColumnLabelBase = 1000;

inline bool is_column_label(int l) { return l >= kColumnLabelBase; }
inline bool is_wall_label(int l) { return l >= kWallLabelBase && l < kColumnLabelBase; }

struct Facility {
  PointCloud cloud;                // labels as above, unit normals
  World world;                     // solids: slabs, shell, columns, partitions, obstacles
  std::vector<Vec2> column_centers;
  double column_radius = 0.0;
  int wall_count = 0;              // wall faces (perimeter + partition faces)
  Aabb interior;

  /// Ground-truth occupancy of the solids at the given resolution.
  VoxelGrid truth_grid(double resolution) const { return world.occupancy(resolution); }
};

/// Samples floor, roof, walls and columns on a jittered grid with Gaussian
/// noise. Deterministic given `spec`, which carries the seed.
Facility gen_facility(const FacilitySpec& spec);

}  // namespace mavi
