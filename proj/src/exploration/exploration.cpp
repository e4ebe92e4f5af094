#include "mavi/exploration/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace mavi {

ExplorationTarget column_target(int id, const Vec2& center, double radius, double h_min, double h_max) {
  if (!(radius > 0.0) || !(h_max >= h_min)) throw InvalidInput("column target needs radius > 0 and h_max >= h_min");
  ExplorationTarget t;
  t.id = id;
  t.kind = StructureKind::Column;
  t.center = center;
  t.radius = radius;
  t.h_min = h_min;
  t.h_max = h_max;
  return t;
}

ExplorationTarget wall_target(int id, const BoundingGridMap& grid) {
  if (grid.rows <= 0 || grid.cols <= 0) throw InvalidInput("empty wall grid");
  ExplorationTarget t;
  t.id = id;
  t.kind = StructureKind::Wall;
  Vec3 n = grid.normal;
  n.z() = 0.0;
  if (n.norm() < 1e-9) throw InvalidInput("wall normal is vertical");
  t.wall_normal = n.normalized();
  t.wall_along = Vec3(-t.wall_normal.y(), t.wall_normal.x(), 0.0);
  // Corners of the rectangle on the offset plane, moved back onto the wall.
  const Vec3 a = grid.origin - grid.offset * grid.normal;
  const Vec3 du = grid.cols * grid.cell * grid.u;
  const Vec3 dv = grid.rows * grid.cell * grid.v;
  double lo = 1e300, hi = -1e300, zlo = 1e300, zhi = -1e300;
  Vec3 sum = Vec3::Zero();
  const Vec3 corners[] = {a, a + du, a + dv, a + du + dv};
  for (const Vec3& c : corners) {
    const double s = c.dot(t.wall_along);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    zlo = std::min(zlo, c.z());
    zhi = std::max(zhi, c.z());
    sum += c;
  }
  t.wall_center = sum / 4.0;
  t.wall_width = hi - lo;
  t.h_min = zlo;
  t.h_max = zhi;
  return t;
}

int height_shift_steps(int attempt) {
  if (attempt <= 0) return 0;
  const int mag = (attempt + 1) / 2;
  return attempt % 2 == 1 ? -mag : mag;
}

std::vector<Waypoint> gen_exploration_goals(const ExplorationTarget& target, int attempt, const VoxelGrid& grid,
                                            const GoalParams& params) {
  if (params.goals_per_column < 1) throw InvalidInput("need at least one goal per lap");
  const Fov fov = compute_fov(params.camera);
  const double D = params.camera.distance;
  const double dh = fov.height / 2.0;
  double z = 0.5 * (target.h_min + target.h_max) + height_shift_steps(attempt) * dh;
  z = std::clamp(z, params.min_altitude, params.max_altitude);

  // Candidate positions with the outward direction used for relocation.
  std::vector<std::pair<Vec3, Vec3>> cands;
  if (target.kind == StructureKind::Column) {
    const double rad = target.radius + D + params.margin;
    const int k = params.goals_per_column;
    for (int i = 0; i < k; ++i) {
      const double th = 2.0 * std::numbers::pi * i / k;
      const Vec3 dir(std::cos(th), std::sin(th), 0.0);
      cands.emplace_back(Vec3(target.center.x(), target.center.y(), z) + rad * dir, dir);
    }
  } else if (target.kind == StructureKind::Wall) {
    const int n = std::max(1, static_cast<int>(std::ceil(target.wall_width / fov.width - 1e-9)));
    const double spacing = target.wall_width / n;
    for (int i = 0; i < n; ++i) {
      const double s = (i + 0.5) * spacing - 0.5 * target.wall_width;
      Vec3 p = target.wall_center + s * target.wall_along + (D + params.margin) * target.wall_normal;
      p.z() = z;
      cands.emplace_back(p, target.wall_normal);
    }
  } else {
    throw InvalidInput("exploration goals need a column or wall target");
  }

  std::vector<Waypoint> goals;
  const double step = grid.resolution();
  for (const auto& [p0, dir] : cands) {
    for (double off = 0.0; off <= params.relocation_max + 1e-9; off += step) {
      const Vec3 p = p0 + off * dir;
      if (grid.is_blocked(grid.key_of(p))) continue;
      Waypoint w;
      w.position = p;
      const Vec3 face = target.kind == StructureKind::Column
                            ? Vec3(target.center.x() - p.x(), target.center.y() - p.y(), 0.0)
                            : Vec3(-dir);
      w.yaw = std::atan2(face.y(), face.x());
      goals.push_back(w);
      break;
    }
  }
  if (goals.empty()) throw Error("every exploration goal lies inside obstacles");
  return goals;
}

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double l2 = ab.squaredNorm();
  const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

std::vector<VoxelKey> region_of_interest(const ScanPath& path, double resolution, double dilation,
                                         const VoxelGrid* exclude) {
  if (!(resolution > 0.0) || dilation < 0.0) throw InvalidInput("bad region parameters");
  if (exclude && std::abs(exclude->resolution() - resolution) > 1e-12)
    throw InvalidInput("excluded grid must share the region resolution");
  VoxelGrid frame(resolution);
  std::set<VoxelKey> keys;
  const auto& w = path.waypoints;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Vec3& a = w[i].position;
    const Vec3& b = i + 1 < w.size() ? w[i + 1].position : a;
    const VoxelKey lo = frame.key_of(a.cwiseMin(b).array() - dilation);
    const VoxelKey hi = frame.key_of(a.cwiseMax(b).array() + dilation);
    for (int x = lo.x; x <= hi.x; ++x)
      for (int y = lo.y; y <= hi.y; ++y)
        for (int z = lo.z; z <= hi.z; ++z) {
          const VoxelKey k{x, y, z};
          if (point_segment_distance(frame.center_of(k), a, b) <= dilation) keys.insert(k);
        }
  }
  std::vector<VoxelKey> out;
  out.reserve(keys.size());
  for (const auto& k : keys)
    if (!exclude || !exclude->is_obstacle(k)) out.push_back(k);
  return out;
}

double exploration_rate(const VoxelGrid& task_map, const std::vector<VoxelKey>& roi) {
  if (roi.empty()) return 1.0;
  std::size_t known = 0;
  for (const auto& k : roi) known += task_map.is_known(k) ? 1 : 0;
  return static_cast<double>(known) / static_cast<double>(roi.size());
}

ScanPath densify_helix(const ScanPath& path, const Vec2& center, double max_step, std::vector<int>* source) {
  path.validate();
  if (!(max_step > 0.0)) throw InvalidInput("densify step must be positive");
  ScanPath out;
  out.kind = path.kind;
  out.source_id = path.source_id;
  std::vector<int> src;
  const auto& w = path.waypoints;
  auto polar = [&](const Vec3& p) {
    const Vec2 d = p.head<2>() - center;
    return std::pair{std::atan2(d.y(), d.x()), d.norm()};
  };
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.waypoints.push_back(w[i]);
    src.push_back(static_cast<int>(i));
    if (i + 1 == w.size()) break;
    const auto [ta, ra] = polar(w[i].position);
    const auto [tb, rb] = polar(w[i + 1].position);
    double dth = std::fmod(tb - ta, 2.0 * std::numbers::pi);
    if (dth <= 1e-9) dth += 2.0 * std::numbers::pi;
    const double dz = w[i + 1].position.z() - w[i].position.z();
    const double len = std::hypot(0.5 * (ra + rb) * dth, dz);
    const int steps = static_cast<int>(std::ceil(len / max_step - 1e-9));
    for (int k = 1; k < steps; ++k) {
      const double f = static_cast<double>(k) / steps;
      const double th = ta + f * dth, r = ra + f * (rb - ra);
      Waypoint q;
      q.position = Vec3(center.x() + r * std::cos(th), center.y() + r * std::sin(th), w[i].position.z() + f * dz);
      q.yaw = wrap_angle(th + std::numbers::pi);
      out.waypoints.push_back(q);
      src.push_back(-1);
    }
  }
  if (source) *source = std::move(src);
  return out;
}

ReplanResult check_and_replan(const VoxelGrid& grid, const ScanPath& path, const AStarOptions& opts) {
  path.validate();
  ReplanResult res;
  res.path.source_id = path.source_id;
  res.path.kind = path.kind;
  const auto& w = path.waypoints;
  const std::size_t n = w.size();
  auto blocked = [&](std::size_t i) { return grid.is_blocked(grid.key_of(w[i].position)); };
  if (blocked(0) || blocked(n - 1)) {
    res.failure = blocked(0) ? "first scan waypoint is blocked" : "last scan waypoint is blocked";
    return res;
  }

  AStarOptions strict = opts;
  strict.unknown_is_free = false;
  strict.inflated_is_free = false;
  AStarOptions loose = strict;
  loose.unknown_is_free = true;

  std::size_t i = 0;
  while (i < n) {
    if (!blocked(i)) {
      res.path.waypoints.push_back(w[i]);
      res.source.push_back(static_cast<int>(i));
      ++i;
      continue;
    }
    // Blocked run [i, j); w[i-1] and w[j] are free.
    std::size_t j = i;
    while (j < n && blocked(j)) ++j;
    const Waypoint& a = w[i - 1];
    const Waypoint& b = w[j];
    AStarResult found = astar(grid, a.position, b.position, strict);
    if (!found.found) found = astar(grid, a.position, b.position, loose);
    if (!found.found) {
      res.failure = "no free route around blocked waypoints " + std::to_string(i) + ".." + std::to_string(j - 1);
      return res;
    }
    const std::size_t m = found.path.size();
    const double dyaw = wrap_angle(b.yaw - a.yaw);
    for (std::size_t k = 1; k + 1 < m; ++k) {
      Waypoint q;
      q.position = found.path[k];
      q.yaw = wrap_angle(a.yaw + dyaw * static_cast<double>(k) / static_cast<double>(m - 1));
      res.path.waypoints.push_back(q);
      res.source.push_back(-1);
    }
    res.blocked += static_cast<int>(j - i);
    i = j;
  }
  res.ok = true;
  return res;
}

}  // namespace mavi
