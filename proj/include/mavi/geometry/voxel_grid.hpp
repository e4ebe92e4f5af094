#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "mavi/geometry/point_cloud.hpp"
#include "mavi/geometry/types.hpp"

namespace mavi {

enum class VoxelState : std::uint8_t { Free = 0, Obstacle = 1, Inflated = 2 };

/// Integer voxel coordinates L = floor(p / r).
struct VoxelKey {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  friend auto operator<=>(const VoxelKey&, const VoxelKey&) = default;

  VoxelKey operator+(const VoxelKey& o) const { return {x + o.x, y + o.y, z + o.z}; }
};

inline constexpr std::int64_t kHashPrimeX = 73856093;
inline constexpr std::int64_t kHashPrimeY = 83492791;

/// L_x + L_y n_x + L_z n_x n_y with two's-complement wrap-around.
std::int64_t voxel_hash(const VoxelKey& key);

struct VoxelIndex {
  VoxelKey key;
  std::int64_t hash = 0;
};

/// Throws InvalidInput for r <= 0 or a non-finite point.
VoxelIndex voxel_index(const Vec3& p, double resolution);

struct VoxelKeyHasher {
  std::size_t operator()(const VoxelKey& k) const {
    return static_cast<std::size_t>(voxel_hash(k));
  }
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// Sparse three-state occupancy map. Voxels that were never written are
/// unknown. An optional bounding box restricts which voxels may be written.
///
/// Reads through const methods may run concurrently; writes need exclusive
/// access.
class VoxelGrid {
 public:
  using Storage = std::unordered_map<VoxelKey, VoxelState, VoxelKeyHasher>;

  explicit VoxelGrid(double resolution);
  VoxelGrid(double resolution, const Aabb& bounds);

  double resolution() const { return resolution_; }
  const std::optional<Aabb>& bounds() const { return bounds_; }

  VoxelKey key_of(const Vec3& p) const;
  Vec3 center_of(const VoxelKey& key) const;
  Aabb box_of(const VoxelKey& key) const;
  bool in_bounds(const VoxelKey& key) const;

  std::optional<VoxelState> state(const VoxelKey& key) const;
  std::optional<VoxelState> state_at(const Vec3& p) const { return state(key_of(p)); }
  bool is_known(const VoxelKey& key) const { return cells_.contains(key); }
  /// State 1 or 2.
  bool is_blocked(const VoxelKey& key) const;
  bool is_obstacle(const VoxelKey& key) const;

  /// Writes outside the bounds are ignored.
  void set(const VoxelKey& key, VoxelState s);
  void erase(const VoxelKey& key) { cells_.erase(key); }
  void clear() { cells_.clear(); }

  std::size_t size() const { return cells_.size(); }
  std::size_t count(VoxelState s) const;
  const Storage& cells() const { return cells_; }

  /// Carves free space along every ray, then marks every endpoint voxel as an
  /// obstacle. Obstacle voxels are never cleared by carving. Rays are clipped
  /// to the bounds; the origin must lie inside them.
  void raycast_update(const Vec3& origin, const PointCloud& scan);

  /// Marks every non-obstacle voxel (free or unknown) whose centre lies within
  /// `margin` of an obstacle voxel centre as inflated.
  void inflate(double margin);

  /// CSV rows "Lx,Ly,Lz,state", sorted by key.
  void write_csv(std::ostream& os) const;

  /// Voxels visited by a 3-D DDA walk from a to b, both end voxels included.
  std::vector<VoxelKey> traverse(const Vec3& a, const Vec3& b) const;

 private:
  double resolution_;
  std::optional<Aabb> bounds_;
  VoxelKey key_lo_{};
  VoxelKey key_hi_{};
  Storage cells_;
};

}  // namespace mavi
