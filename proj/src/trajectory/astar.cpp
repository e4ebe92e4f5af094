#include "mavi/trajectory/astar.hpp"

#include <cmath>
#include <queue>
#include <unordered_map>

namespace mavi {

bool voxel_passable(const VoxelGrid& grid, const VoxelKey& k, const AStarOptions& opts) {
  const auto s = grid.state(k);
  if (!s) return opts.unknown_is_free;
  switch (*s) {
    case VoxelState::Free: return true;
    case VoxelState::Obstacle: return false;
    case VoxelState::Inflated: return opts.inflated_is_free;
  }
  return false;
}

bool segment_free(const VoxelGrid& grid, const Vec3& a, const Vec3& b, const AStarOptions& opts,
                  bool skip_start) {
  const VoxelKey ka = grid.key_of(a);
  for (const auto& k : grid.traverse(a, b)) {
    if (skip_start && k == ka) continue;
    if (!voxel_passable(grid, k, opts)) return false;
  }
  return true;
}

namespace {

Aabb search_box(const VoxelGrid& grid, const Vec3& s, const Vec3& g, const AStarOptions& opts) {
  if (opts.bounds) return *opts.bounds;
  if (grid.bounds()) return *grid.bounds();
  return Aabb{s.cwiseMin(g) - Vec3::Constant(opts.box_margin), s.cwiseMax(g) + Vec3::Constant(opts.box_margin)};
}

}  // namespace

AStarResult astar(const VoxelGrid& grid, const Vec3& start, const Vec3& goal, const AStarOptions& opts) {
  AStarResult res;
  const VoxelKey ks = grid.key_of(start), kg = grid.key_of(goal);
  if (!voxel_passable(grid, kg, opts)) return res;
  const Aabb box = search_box(grid, start, goal, opts);
  auto inside = [&](const VoxelKey& k) { return box.contains(grid.center_of(k)); };

  struct Node {
    double f;
    double g;
    VoxelKey k;
    bool operator>(const Node& o) const { return f > o.f || (f == o.f && k > o.k); }
  };
  auto h = [&](const VoxelKey& k) {
    const double dx = k.x - kg.x, dy = k.y - kg.y, dz = k.z - kg.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  std::unordered_map<VoxelKey, double, VoxelKeyHasher> best_g;
  std::unordered_map<VoxelKey, VoxelKey, VoxelKeyHasher> parent;
  best_g[ks] = 0.0;
  open.push({h(ks), 0.0, ks});

  bool found = false;
  while (!open.empty() && res.expansions < opts.max_expansions) {
    const Node cur = open.top();
    open.pop();
    if (cur.g > best_g[cur.k]) continue;
    ++res.expansions;
    if (cur.k == kg) {
      found = true;
      break;
    }
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          if (!dx && !dy && !dz) continue;
          const VoxelKey n{cur.k.x + dx, cur.k.y + dy, cur.k.z + dz};
          if (!inside(n) || !voxel_passable(grid, n, opts)) continue;
          const double g = cur.g + std::sqrt(double(dx * dx + dy * dy + dz * dz));
          auto it = best_g.find(n);
          if (it != best_g.end() && it->second <= g) continue;
          best_g[n] = g;
          parent[n] = cur.k;
          open.push({g + h(n), g, n});
        }
      }
    }
  }
  if (!found) return res;

  std::vector<Vec3> rev{goal};
  for (VoxelKey k = parent.count(kg) ? parent[kg] : ks; !(k == ks); k = parent[k]) rev.push_back(grid.center_of(k));
  rev.push_back(start);
  res.path.assign(rev.rbegin(), rev.rend());
  res.found = true;
  return res;
}

std::vector<Vec3> shortcut_path(const std::vector<Vec3>& path, const VoxelGrid& grid, const AStarOptions& opts) {
  if (path.size() <= 2) return path;
  std::vector<Vec3> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !segment_free(grid, path[i], path[j], opts, i == 0)) --j;
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

}  // namespace mavi
