#pragma once

#include <optional>
#include <vector>

#include "mavi/geometry/voxel_grid.hpp"

namespace mavi {

/// Solid primitive of the simulated scene: an axis-aligned box or a vertical
/// cylinder. `label` and `instance` are free-form tags for the caller.
struct Primitive {
  enum class Shape { Box, Cylinder };
  Shape shape = Shape::Box;
  Aabb box;                       // Box; also the bounding box of a cylinder
  Vec2 center = Vec2::Zero();     // Cylinder
  double radius = 0.0;            // Cylinder
  int label = -1;
  int instance = -1;

  bool contains(const Vec3& p) const;
  /// Entry distance along a unit ray, if it hits within [0, max_range].
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir, double max_range) const;
};

struct RayHit {
  double distance = 0.0;
  int primitive = -1;
};

/// Ground-truth scene used for sensing and for post-hoc collision checks.
class World {
 public:
  int add_box(const Vec3& min, const Vec3& max, int label = -1, int instance = -1);
  int add_cylinder(const Vec2& center, double radius, double z_min, double z_max, int label = -1,
                   int instance = -1);

  const std::vector<Primitive>& primitives() const { return prims_; }
  bool empty() const { return prims_.empty(); }
  Aabb bounds() const;

  bool inside(const Vec3& p) const;
  /// Nearest hit along a unit direction, if any within max_range.
  std::optional<RayHit> raycast(const Vec3& origin, const Vec3& dir, double max_range) const;

  /// Every voxel whose box overlaps a primitive is an obstacle.
  VoxelGrid occupancy(double resolution) const;

 private:
  std::vector<Primitive> prims_;
};

}  // namespace mavi
