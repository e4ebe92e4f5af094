#include "mavi/exploration/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mavi {

namespace {

// Slab test against an axis-aligned box; returns the entry distance (0 when
// the origin is inside).
std::optional<double> ray_box(const Aabb& b, const Vec3& o, const Vec3& d, double max_range) {
  double t0 = 0.0, t1 = max_range;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (o[i] < b.min[i] || o[i] > b.max[i]) return std::nullopt;
      continue;
    }
    double a = (b.min[i] - o[i]) / d[i];
    double c = (b.max[i] - o[i]) / d[i];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace

bool Primitive::contains(const Vec3& p) const {
  if (!box.contains(p)) return false;
  if (shape == Shape::Box) return true;
  return (p.head<2>() - center).squaredNorm() <= radius * radius;
}

std::optional<double> Primitive::intersect(const Vec3& o, const Vec3& d, double max_range) const {
  if (shape == Shape::Box) return ray_box(box, o, d, max_range);

  const double zlo = box.min.z(), zhi = box.max.z();
  double t0 = 0.0, t1 = max_range;
  // Vertical extent.
  if (std::abs(d.z()) < 1e-15) {
    if (o.z() < zlo || o.z() > zhi) return std::nullopt;
  } else {
    double a = (zlo - o.z()) / d.z(), c = (zhi - o.z()) / d.z();
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return std::nullopt;
  }
  // Infinite cylinder in the xy plane.
  const Vec2 oc = o.head<2>() - center;
  const Vec2 dh = d.head<2>();
  const double A = dh.squaredNorm();
  const double C = oc.squaredNorm() - radius * radius;
  if (A < 1e-15) {
    if (C > 0.0) return std::nullopt;
  } else {
    const double B = oc.dot(dh);
    const double disc = B * B - A * C;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    t0 = std::max(t0, (-B - sq) / A);
    t1 = std::min(t1, (-B + sq) / A);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

int World::add_box(const Vec3& min, const Vec3& max, int label, int instance) {
  if (!min.allFinite() || !max.allFinite() || (max.array() <= min.array()).any())
    throw InvalidInput("box needs finite min < max");
  Primitive p;
  p.shape = Primitive::Shape::Box;
  p.box = {min, max};
  p.label = label;
  p.instance = instance;
  prims_.push_back(p);
  return static_cast<int>(prims_.size()) - 1;
}

int World::add_cylinder(const Vec2& center, double radius, double z_min, double z_max, int label,
                        int instance) {
  if (!center.allFinite() || !(radius > 0.0) || !(z_max > z_min))
    throw InvalidInput("cylinder needs radius > 0 and z_max > z_min");
  Primitive p;
  p.shape = Primitive::Shape::Cylinder;
  p.center = center;
  p.radius = radius;
  p.box = {Vec3(center.x() - radius, center.y() - radius, z_min),
           Vec3(center.x() + radius, center.y() + radius, z_max)};
  p.label = label;
  p.instance = instance;
  prims_.push_back(p);
  return static_cast<int>(prims_.size()) - 1;
}

Aabb World::bounds() const {
  if (prims_.empty()) return {};
  Aabb b = prims_.front().box;
  for (const auto& p : prims_) {
    b.min = b.min.cwiseMin(p.box.min);
    b.max = b.max.cwiseMax(p.box.max);
  }
  return b;
}

bool World::inside(const Vec3& p) const {
  return std::any_of(prims_.begin(), prims_.end(), [&](const Primitive& q) { return q.contains(p); });
}

std::optional<RayHit> World::raycast(const Vec3& origin, const Vec3& dir, double max_range) const {
  std::optional<RayHit> best;
  double range = max_range;
  for (std::size_t i = 0; i < prims_.size(); ++i) {
    const auto t = prims_[i].intersect(origin, dir, range);
    if (t && (!best || *t < best->distance)) {
      best = RayHit{*t, static_cast<int>(i)};
      range = *t;
    }
  }
  return best;
}

VoxelGrid World::occupancy(double resolution) const {
  VoxelGrid grid(resolution);
  for (const auto& p : prims_) {
    const VoxelKey lo = grid.key_of(p.box.min);
    const VoxelKey hi = grid.key_of(p.box.max);
    for (int x = lo.x; x <= hi.x; ++x)
      for (int y = lo.y; y <= hi.y; ++y)
        for (int z = lo.z; z <= hi.z; ++z) {
          const VoxelKey k{x, y, z};
          if (p.shape == Primitive::Shape::Cylinder) {
            // Closest point of the voxel footprint to the axis.
            const Aabb vb = grid.box_of(k);
            const Vec2 c(std::clamp(p.center.x(), vb.min.x(), vb.max.x()),
                         std::clamp(p.center.y(), vb.min.y(), vb.max.y()));
            if ((c - p.center).squaredNorm() > p.radius * p.radius) continue;
          }
          grid.set(k, VoxelState::Obstacle);
        }
  }
  return grid;
}

}  // namespace mavi
