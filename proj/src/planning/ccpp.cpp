#include "mavi/planning/ccpp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace mavi {

namespace {

// (drow, dcol) for 0, 45, ..., 315 degrees with columns as the x axis.
constexpr std::array<std::array<int, 2>, 8> kDirs{{{0, 1}, {1, 1}, {1, 0}, {1, -1},
                                                   {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

}  // namespace

std::vector<GridCell> ccpp(const BoundingGridMap& grid, GridCell start) {
  if (!grid.is_free(start.row, start.col)) throw InvalidInput("CCPP start cell is not free");
  const int R = grid.rows, C = grid.cols;
  auto idx = [C](int r, int c) { return static_cast<std::size_t>(r) * C + c; };

  std::vector<double> value = grid.values;
  std::vector<char> visited(value.size(), 0);
  int remaining = grid.free_count();

  std::vector<GridCell> path;
  GridCell cur = start;
  auto visit = [&](GridCell c) {
    path.push_back(c);
    if (!visited[idx(c.row, c.col)]) {
      visited[idx(c.row, c.col)] = 1;
      value[idx(c.row, c.col)] = 0.0;
      --remaining;
    }
    cur = c;
  };
  visit(start);

  std::vector<int> parent(value.size());
  while (remaining > 0) {
    int best = -1;
    double best_v = 0.0;
    for (int d = 0; d < 8; ++d) {
      const int r = cur.row + kDirs[d][0], c = cur.col + kDirs[d][1];
      if (!grid.in_range(r, c)) continue;
      if (value[idx(r, c)] > best_v) best_v = value[idx(r, c)], best = d;
    }
    if (best >= 0) {
      visit({cur.row + kDirs[best][0], cur.col + kDirs[best][1]});
      continue;
    }

    // Dead end: breadth-first search through free cells to the nearest unvisited one.
    std::fill(parent.begin(), parent.end(), -1);
    std::queue<int> q;
    const int s = static_cast<int>(idx(cur.row, cur.col));
    parent[s] = s;
    q.push(s);
    int goal = -1;
    while (!q.empty() && goal < 0) {
      const int k = q.front();
      q.pop();
      const int r0 = k / C, c0 = k % C;
      for (const auto& dd : kDirs) {
        const int r = r0 + dd[0], c = c0 + dd[1];
        if (!grid.is_free(r, c)) continue;
        const int kk = static_cast<int>(idx(r, c));
        if (parent[kk] >= 0) continue;
        parent[kk] = k;
        if (!visited[kk]) {
          goal = kk;
          break;
        }
        q.push(kk);
      }
    }
    if (goal >= 0) {
      std::vector<int> chain;
      for (int k = goal; k != s; k = parent[k]) chain.push_back(k);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) visit({*it / C, *it % C});
      continue;
    }
    // Disconnected remainder: jump to the closest unvisited free cell.
    long best_d = -1;
    GridCell target{};
    for (int r = 0; r < R; ++r) {
      for (int c = 0; c < C; ++c) {
        if (!grid.is_free(r, c) || visited[idx(r, c)]) continue;
        const long d = static_cast<long>(r - cur.row) * (r - cur.row) + static_cast<long>(c - cur.col) * (c - cur.col);
        if (best_d < 0 || d < best_d) best_d = d, target = {r, c};
      }
    }
    visit(target);
  }
  return path;
}

GridCell nearest_free_cell(const BoundingGridMap& grid, const Vec3& p) {
  const auto [pr, pc] = grid.cell_of(p);
  long best_d = -1;
  GridCell out{};
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (!grid.is_free(r, c)) continue;
      const long d = static_cast<long>(r - pr) * (r - pr) + static_cast<long>(c - pc) * (c - pc);
      if (best_d < 0 || d < best_d) best_d = d, out = {r, c};
    }
  }
  if (best_d < 0) throw InvalidInput("grid has no free cell");
  return out;
}

ScanPath grid_path_to_waypoints(const std::vector<GridCell>& path, const BoundingGridMap& grid,
                                int source_id) {
  ScanPath sp;
  sp.kind = ScanPathKind::Coverage;
  sp.source_id = source_id;
  const Vec2 face(-grid.normal.x(), -grid.normal.y());
  const double yaw = face.norm() > 1e-9 ? std::atan2(face.y(), face.x()) : 0.0;
  for (const auto& c : path) sp.waypoints.push_back({grid.cell_center(c.row, c.col), yaw});
  return sp;
}

}  // namespace mavi
