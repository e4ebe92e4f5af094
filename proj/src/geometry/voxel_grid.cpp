#include "mavi/geometry/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace mavi {

std::int64_t voxel_hash(const VoxelKey& key) {
  // Unsigned arithmetic gives defined wrap-around.
  const auto x = static_cast<std::uint64_t>(static_cast<std::int64_t>(key.x));
  const auto y = static_cast<std::uint64_t>(static_cast<std::int64_t>(key.y));
  const auto z = static_cast<std::uint64_t>(static_cast<std::int64_t>(key.z));
  const auto nx = static_cast<std::uint64_t>(kHashPrimeX);
  const auto ny = static_cast<std::uint64_t>(kHashPrimeY);
  return static_cast<std::int64_t>(x + y * nx + z * nx * ny);
}

VoxelIndex voxel_index(const Vec3& p, double resolution) {
  if (!(resolution > 0.0)) throw InvalidInput("voxel resolution must be positive");
  if (!p.allFinite()) throw InvalidInput("voxel_index of a non-finite point");
  VoxelKey key{static_cast<int>(std::floor(p.x() / resolution)),
               static_cast<int>(std::floor(p.y() / resolution)),
               static_cast<int>(std::floor(p.z() / resolution))};
  return {key, voxel_hash(key)};
}

VoxelGrid::VoxelGrid(double resolution) : resolution_(resolution) {
  if (!(resolution > 0.0)) throw InvalidInput("voxel resolution must be positive");
}

VoxelGrid::VoxelGrid(double resolution, const Aabb& bounds) : VoxelGrid(resolution) {
  if (!(bounds.max.array() >= bounds.min.array()).all()) {
    throw InvalidInput("grid bounds are inverted");
  }
  bounds_ = bounds;
  key_lo_ = key_of(bounds.min);
  key_hi_ = key_of(bounds.max);
}

VoxelKey VoxelGrid::key_of(const Vec3& p) const {
  return {static_cast<int>(std::floor(p.x() / resolution_)),
          static_cast<int>(std::floor(p.y() / resolution_)),
          static_cast<int>(std::floor(p.z() / resolution_))};
}

Vec3 VoxelGrid::center_of(const VoxelKey& key) const {
  return Vec3((key.x + 0.5) * resolution_, (key.y + 0.5) * resolution_,
              (key.z + 0.5) * resolution_);
}

Aabb VoxelGrid::box_of(const VoxelKey& key) const {
  const Vec3 lo(key.x * resolution_, key.y * resolution_, key.z * resolution_);
  return {lo, lo + Vec3::Constant(resolution_)};
}

bool VoxelGrid::in_bounds(const VoxelKey& k) const {
  if (!bounds_) return true;
  return k.x >= key_lo_.x && k.y >= key_lo_.y && k.z >= key_lo_.z &&
         k.x <= key_hi_.x && k.y <= key_hi_.y && k.z <= key_hi_.z;
}

std::optional<VoxelState> VoxelGrid::state(const VoxelKey& key) const {
  auto it = cells_.find(key);
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

bool VoxelGrid::is_blocked(const VoxelKey& key) const {
  auto it = cells_.find(key);
  return it != cells_.end() && it->second != VoxelState::Free;
}

bool VoxelGrid::is_obstacle(const VoxelKey& key) const {
  auto it = cells_.find(key);
  return it != cells_.end() && it->second == VoxelState::Obstacle;
}

void VoxelGrid::set(const VoxelKey& key, VoxelState s) {
  if (!in_bounds(key)) return;
  cells_[key] = s;
}

std::size_t VoxelGrid::count(VoxelState s) const {
  return static_cast<std::size_t>(std::count_if(
      cells_.begin(), cells_.end(), [s](const auto& kv) { return kv.second == s; }));
}

std::vector<VoxelKey> VoxelGrid::traverse(const Vec3& a, const Vec3& b) const {
  std::vector<VoxelKey> out;
  VoxelKey cur = key_of(a);
  const VoxelKey end = key_of(b);
  out.push_back(cur);
  if (cur == end) return out;

  const Vec3 dir = b - a;
  int step[3];
  double t_max[3];
  double t_delta[3];
  const int cur_idx[3] = {cur.x, cur.y, cur.z};
  for (int i = 0; i < 3; ++i) {
    if (dir[i] > 0.0) {
      step[i] = 1;
      t_max[i] = ((cur_idx[i] + 1) * resolution_ - a[i]) / dir[i];
      t_delta[i] = resolution_ / dir[i];
    } else if (dir[i] < 0.0) {
      step[i] = -1;
      t_max[i] = (cur_idx[i] * resolution_ - a[i]) / dir[i];
      t_delta[i] = -resolution_ / dir[i];
    } else {
      step[i] = 0;
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }

  const int max_steps = std::abs(end.x - cur.x) + std::abs(end.y - cur.y) + std::abs(end.z - cur.z);
  int c[3] = {cur.x, cur.y, cur.z};
  const int e[3] = {end.x, end.y, end.z};
  for (int n = 0; n < max_steps; ++n) {
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    // Rounding can push the walk past the end coordinate on one axis.
    if (c[axis] == e[axis]) {
      int alt = -1;
      for (int i = 0; i < 3; ++i) {
        if (c[i] != e[i] && (alt < 0 || t_max[i] < t_max[alt])) alt = i;
      }
      if (alt < 0) break;
      axis = alt;
    }
    c[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    out.push_back({c[0], c[1], c[2]});
    if (c[0] == e[0] && c[1] == e[1] && c[2] == e[2]) break;
  }
  return out;
}

void VoxelGrid::raycast_update(const Vec3& origin, const PointCloud& scan) {
  if (scan.empty()) return;
  if (!origin.allFinite()) throw InvalidInput("raycast origin is not finite");
  if (!in_bounds(key_of(origin))) throw InvalidInput("raycast origin outside map bounds");

  std::vector<VoxelKey> endpoints;
  endpoints.reserve(scan.size());
  for (const auto& p : scan.points) {
    if (!p.allFinite()) continue;
    const auto ray = traverse(origin, p);
    const VoxelKey end = key_of(p);
    for (const auto& k : ray) {
      if (k == end) break;
      if (!in_bounds(k)) break;
      auto [it, inserted] = cells_.try_emplace(k, VoxelState::Free);
      if (!inserted && it->second != VoxelState::Obstacle) it->second = VoxelState::Free;
    }
    endpoints.push_back(end);
  }
  for (const auto& k : endpoints) set(k, VoxelState::Obstacle);
}

namespace {

// Exact 1-D squared distance transform (lower envelope of parabolas).
// Cells without a source carry kFar, which stays far above any real distance.
constexpr double kFar = 1e20;

void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

void VoxelGrid::inflate(double margin) {
  if (margin < 0.0) throw InvalidInput("inflation margin must be non-negative");
  if (margin == 0.0) return;

  VoxelKey lo{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
              std::numeric_limits<int>::max()};
  VoxelKey hi{std::numeric_limits<int>::min(), std::numeric_limits<int>::min(),
              std::numeric_limits<int>::min()};
  bool any = false;
  for (const auto& [k, s] : cells_) {
    if (s != VoxelState::Obstacle) continue;
    any = true;
    lo = {std::min(lo.x, k.x), std::min(lo.y, k.y), std::min(lo.z, k.z)};
    hi = {std::max(hi.x, k.x), std::max(hi.y, k.y), std::max(hi.z, k.z)};
  }
  if (!any) return;

  const double reach = margin / resolution_;
  const int pad = static_cast<int>(std::floor(reach * (1.0 + 1e-12))) + 1;
  lo = {lo.x - pad, lo.y - pad, lo.z - pad};
  hi = {hi.x + pad, hi.y + pad, hi.z + pad};
  const int nx = hi.x - lo.x + 1;
  const int ny = hi.y - lo.y + 1;
  const int nz = hi.z - lo.z + 1;
  const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
  std::vector<double> dist(total, kFar);
  auto idx = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  };
  for (const auto& [k, s] : cells_) {
    if (s == VoxelState::Obstacle) dist[idx(k.x - lo.x, k.y - lo.y, k.z - lo.z)] = 0.0;
  }

  const int nmax = std::max({nx, ny, nz});
  std::vector<double> f(nmax), d(nmax), z(nmax + 1);
  std::vector<int> v(nmax);
  for (int zz = 0; zz < nz; ++zz) {
    for (int yy = 0; yy < ny; ++yy) {
      for (int xx = 0; xx < nx; ++xx) f[xx] = dist[idx(xx, yy, zz)];
      edt_1d(f.data(), d.data(), nx, v.data(), z.data());
      for (int xx = 0; xx < nx; ++xx) dist[idx(xx, yy, zz)] = d[xx];
    }
  }
  for (int zz = 0; zz < nz; ++zz) {
    for (int xx = 0; xx < nx; ++xx) {
      for (int yy = 0; yy < ny; ++yy) f[yy] = dist[idx(xx, yy, zz)];
      edt_1d(f.data(), d.data(), ny, v.data(), z.data());
      for (int yy = 0; yy < ny; ++yy) dist[idx(xx, yy, zz)] = d[yy];
    }
  }
  for (int yy = 0; yy < ny; ++yy) {
    for (int xx = 0; xx < nx; ++xx) {
      for (int zz = 0; zz < nz; ++zz) f[zz] = dist[idx(xx, yy, zz)];
      edt_1d(f.data(), d.data(), nz, v.data(), z.data());
      for (int zz = 0; zz < nz; ++zz) dist[idx(xx, yy, zz)] = d[zz];
    }
  }

  // Squared voxel-unit distances are integers, so compare with a relative slack.
  const double limit = reach * reach * (1.0 + 1e-9);
  for (int zz = 0; zz < nz; ++zz) {
    for (int yy = 0; yy < ny; ++yy) {
      for (int xx = 0; xx < nx; ++xx) {
        const double dd = dist[idx(xx, yy, zz)];
        if (dd == 0.0 || dd > limit) continue;
        const VoxelKey k{xx + lo.x, yy + lo.y, zz + lo.z};
        if (!in_bounds(k)) continue;
        cells_[k] = VoxelState::Inflated;
      }
    }
  }
}

void VoxelGrid::write_csv(std::ostream& os) const {
  std::vector<std::pair<VoxelKey, VoxelState>> rows(cells_.begin(), cells_.end());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [k, s] : rows) {
    os << k.x << ',' << k.y << ',' << k.z << ',' << static_cast<int>(s) << '\n';
  }
}

}  // namespace mavi
