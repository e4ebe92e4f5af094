#include "mavi/planning/wall_projection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mavi/perception/plane_fit.hpp"
#include "mavi/planning/geometry2d.hpp"

namespace mavi {

int BoundingGridMap::free_count() const {
  return static_cast<int>(std::count_if(values.begin(), values.end(), [](double x) { return x > kObstacleValue; }));
}

Vec3 BoundingGridMap::cell_center(int i, int j) const {
  return origin + u * ((j + 0.5) * cell) + v * ((i + 0.5) * cell);
}

std::pair<int, int> BoundingGridMap::cell_of(const Vec3& p) const {
  const Vec3 d = p - origin;
  return {static_cast<int>(std::floor(d.dot(v) / cell)), static_cast<int>(std::floor(d.dot(u) / cell))};
}

namespace {

int free_side(const PointCloud& cloud, const std::vector<int>& ids, const Vec3& n, const Vec3& centroid,
              double D, const WallProjectionOptions& opts) {
  if (opts.task_map) {
    const VoxelGrid& g = *opts.task_map;
    const int steps = std::max(1, static_cast<int>(std::round(D / g.resolution())));
    const std::size_t stride = std::max<std::size_t>(1, ids.size() / 200);
    long pos = 0, neg = 0;
    for (std::size_t k = 0; k < ids.size(); k += stride) {
      const Vec3& p = cloud.points[ids[k]];
      for (int s = 1; s <= steps; ++s) {
        pos += g.state_at(p + n * (s * g.resolution())) == VoxelState::Free;
        neg += g.state_at(p - n * (s * g.resolution())) == VoxelState::Free;
      }
    }
    if (pos != neg) return pos > neg ? 1 : -1;
  }
  if (cloud.has_normals()) {
    long vote = 0;
    for (int i : ids) vote += cloud.normals[i].dot(n) >= 0 ? 1 : -1;
    if (vote != 0) return vote > 0 ? 1 : -1;
  }
  if (opts.interior_point) return (*opts.interior_point - centroid).dot(n) >= 0 ? 1 : -1;
  return 1;
}

}  // namespace

BoundingGridMap project_wall(const PointCloud& cloud, const StructureInstance& wall,
                             const CameraModel& cam, const WallProjectionOptions& opts) {
  const auto& ids = wall.indices;
  if (ids.size() < 3) throw InvalidInput("wall projection needs at least 3 inliers");
  const Fov fov = compute_fov(cam);
  const double cell = opts.cell_size > 0 ? opts.cell_size : std::min(fov.width, fov.height);

  Vec3 n;
  if (wall.plane) {
    n = wall.plane->normal.normalized();
  } else {
    std::vector<Vec3> pts;
    for (int i : ids) pts.push_back(cloud.points[i]);
    n = fit_plane_least_squares(pts).normal;
  }
  Vec3 c = Vec3::Zero();
  for (int i : ids) c += cloud.points[i];
  c /= static_cast<double>(ids.size());
  n *= free_side(cloud, ids, n, c, cam.distance, opts);

  // In-plane basis: e1 horizontal, e2 pointing up.
  Vec3 e1 = Vec3::UnitZ().cross(n);
  if (e1.norm() < 1e-9) e1 = Vec3::UnitX();
  e1.normalize();
  Vec3 e2 = n.cross(e1).normalized();

  std::vector<Vec2> local;
  local.reserve(ids.size());
  for (int i : ids) {
    const Vec3 q = cloud.points[i] - c;
    local.emplace_back(q.dot(e1), q.dot(e2));
  }
  const Rect2 rect = min_area_rect(local);

  BoundingGridMap g;
  g.cell = cell;
  g.normal = n;
  g.offset = cam.distance;
  g.u = (e1 * rect.u.x() + e2 * rect.u.y()).normalized();
  g.v = (e1 * rect.v.x() + e2 * rect.v.y()).normalized();
  Vec2 o2 = rect.origin;
  if (g.v.z() < 0) {
    g.v = -g.v;
    o2 += rect.v * rect.height;
  }
  g.origin = c + n * cam.distance + e1 * o2.x() + e2 * o2.y();
  g.cols = std::max(1, static_cast<int>(std::ceil(rect.width / cell - 1e-9)));
  g.rows = std::max(1, static_cast<int>(std::ceil(rect.height / cell - 1e-9)));

  std::vector<int> hits(static_cast<std::size_t>(g.rows) * g.cols, 0);
  for (int i : ids) {
    auto [r, col] = g.cell_of(cloud.points[i] + n * cam.distance);
    r = std::clamp(r, 0, g.rows - 1);
    col = std::clamp(col, 0, g.cols - 1);
    ++hits[static_cast<std::size_t>(r) * g.cols + col];
  }
  g.values.assign(hits.size(), kObstacleValue);
  for (int r = 0; r < g.rows; ++r) {
    for (int col = 0; col < g.cols; ++col) {
      bool free = hits[static_cast<std::size_t>(r) * g.cols + col] > 0;
      if (free && opts.task_map) free = !opts.task_map->is_blocked(opts.task_map->key_of(g.cell_center(r, col)));
      if (free) g.at(r, col) = free_cell_value(col);
    }
  }
  return g;
}

void write_grid_pgm(std::ostream& os, const BoundingGridMap& grid) {
  os << "P2\n" << grid.cols << ' ' << grid.rows << "\n255\n";
  for (int r = grid.rows - 1; r >= 0; --r) {
    for (int c = 0; c < grid.cols; ++c) {
      const double x = grid.at(r, c);
      const int level = x <= kObstacleValue ? 0 : 55 + static_cast<int>(std::lround(200.0 * std::clamp(x / 50.0, 0.0, 1.0)));
      os << level << (c + 1 < grid.cols ? ' ' : '\n');
    }
  }
}

}  // namespace mavi
