#include "mavi/perception/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mavi/perception/clustering.hpp"
#include "mavi/perception/plane_fit.hpp"

namespace mavi {

StructureInstance extract_roof(const PointCloud& cloud, std::span<const int> indices,
                               const Vec3& ground_normal, const RoofParams& params) {
  const Vec3 ng = ground_normal.normalized();
  std::vector<int> pool(indices.begin(), indices.end());
  if (indices.empty()) {
    pool.resize(cloud.size());
    std::iota(pool.begin(), pool.end(), 0);
  }
  if (pool.size() < 3) throw InvalidInput("no roof: too few points");
  Vec3 centroid = Vec3::Zero();
  for (int i : pool) centroid += cloud.points[i];
  centroid /= static_cast<double>(pool.size());

  RansacOptions opts;
  opts.axis = ng;
  opts.max_axis_angle = params.angle_tol;
  opts.seed = params.seed;

  std::optional<StructureInstance> best;
  double best_height = -1e300;
  for (int k = 0; k < params.max_planes && static_cast<int>(pool.size()) >= params.min_inliers; ++k) {
    std::vector<Vec3> pts;
    pts.reserve(pool.size());
    for (int i : pool) pts.push_back(cloud.points[i]);
    Plane pl;
    try {
      pl = fit_plane_ransac(pts, params.dist_thresh, opts);
    } catch (const InvalidInput&) {
      break;
    }
    if (static_cast<int>(pl.inliers.size()) < params.min_inliers) break;

    std::vector<int> all_ids;
    for (int j : pl.inliers) all_ids.push_back(pool[j]);
    // With normals available, slices through walls do not count as support.
    std::vector<int> ids;
    Vec3 mean = Vec3::Zero();
    for (int i : all_ids) {
      if (cloud.has_normals() && std::abs(cloud.normals[i].dot(pl.normal)) < std::cos(params.normal_angle)) continue;
      ids.push_back(i);
      mean += cloud.points[i];
    }
    if (static_cast<int>(ids.size()) < params.min_inliers) {
      std::sort(all_ids.begin(), all_ids.end());
      std::vector<int> rest;
      for (int i : pool)
        if (!std::binary_search(all_ids.begin(), all_ids.end(), i)) rest.push_back(i);
      pool.swap(rest);
      continue;
    }
    mean /= static_cast<double>(ids.size());
    // Normal faces the inside of the structure.
    if (pl.normal.dot(centroid - mean) < 0.0) {
      pl.normal = -pl.normal;
      pl.d = -pl.d;
    }
    const double height = mean.dot(ng);
    if (pl.normal.dot(ng) <= -std::cos(params.angle_tol) + 1e-12 && height > best_height) {
      best_height = height;
      StructureInstance roof;
      roof.kind = StructureKind::Roof;
      std::sort(ids.begin(), ids.end());
      roof.indices = ids;
      pl.inliers = ids;
      roof.plane = pl;
      best = std::move(roof);
    }
    // Remove this plane's inliers and search for the next one.
    std::vector<int> rest;
    std::vector<int> sorted_ids(all_ids);
    std::sort(sorted_ids.begin(), sorted_ids.end());
    for (int i : pool) {
      if (!std::binary_search(sorted_ids.begin(), sorted_ids.end(), i)) rest.push_back(i);
    }
    pool.swap(rest);
  }
  if (!best) throw InvalidInput("no roof: no plane faces the ground");
  return *best;
}

namespace {

std::vector<int> refine_by_normal(const PointCloud& cloud, const std::vector<int>& ids,
                                  const Vec3& axis, double max_angle) {
  if (!cloud.has_normals()) return ids;
  const double c = std::cos(max_angle);
  std::vector<int> out;
  for (int i : ids) {
    if (std::abs(cloud.normals[i].dot(axis)) >= c) out.push_back(i);
  }
  return out;
}

std::vector<int> minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<int> Segmentation::labels(std::size_t n) const {
  std::vector<int> out(n, -1);
  for (int i : ground.indices) out[i] = 0;
  for (int i : roof.indices) out[i] = 1;
  for (const auto& c : columns)
    for (int i : c.indices) out[i] = 2;
  for (const auto& w : walls)
    for (int i : w.indices) out[i] = 3;
  return out;
}

std::vector<int> Segmentation::instance_ids(std::size_t n) const {
  std::vector<int> out(n, -1);
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (int i : columns[k].indices) out[i] = static_cast<int>(k);
  for (std::size_t k = 0; k < walls.size(); ++k)
    for (int i : walls[k].indices) out[i] = static_cast<int>(k);
  return out;
}

Segmentation segment_structures(const PointCloud& cloud, const SegmentationParams& params) {
  cloud.validate();
  Segmentation seg;
  std::vector<int> all(cloud.size());
  std::iota(all.begin(), all.end(), 0);

  const Vec3 up = Vec3::UnitZ();
  auto csf = extract_ground_csf(cloud, params.csf);
  seg.ground = csf.ground;
  seg.ground.indices = refine_by_normal(cloud, seg.ground.indices, up, params.surface_normal_angle);
  if (seg.ground.indices.size() < 3) throw InvalidInput("ground extraction found too few points");
  {
    std::vector<Vec3> gp;
    for (int i : seg.ground.indices) gp.push_back(cloud.points[i]);
    Plane g = fit_plane_least_squares(gp);
    orient_up(g);
    g.inliers = seg.ground.indices;
    seg.ground.plane = g;
  }
  std::vector<int> rest = minus(all, seg.ground.indices);

  const Vec3 ng = seg.ground.plane->normal;
  seg.roof = extract_roof(cloud, rest, ng, params.roof);
  seg.roof.indices = refine_by_normal(cloud, seg.roof.indices, seg.roof.plane->normal,
                                      params.surface_normal_angle);
  seg.roof.plane->inliers = seg.roof.indices;
  rest = minus(rest, seg.roof.indices);

  std::vector<Vec3> pts;
  pts.reserve(rest.size());
  for (int i : rest) pts.push_back(cloud.points[i]);
  auto local = cluster_euclidean(pts, params.cluster_dist);
  std::vector<std::vector<int>> clusters;
  clusters.reserve(local.size());
  for (auto& cl : local) {
    std::vector<int> ids;
    ids.reserve(cl.size());
    for (int j : cl) ids.push_back(rest[j]);
    clusters.push_back(std::move(ids));
  }

  double ground_h = 0.0, roof_h = 0.0;
  for (int i : seg.ground.indices) ground_h += cloud.points[i].dot(ng);
  ground_h /= static_cast<double>(seg.ground.indices.size());
  for (int i : seg.roof.indices) roof_h += cloud.points[i].dot(ng);
  roof_h /= std::max<double>(1.0, static_cast<double>(seg.roof.indices.size()));
  ColumnCriteria crit = params.columns;
  crit.height_min = params.column_height_fraction * (roof_h - ground_h);
  seg.columns = classify_columns(cloud, clusters, crit);

  std::vector<int> column_pts;
  for (const auto& c : seg.columns) column_pts.insert(column_pts.end(), c.indices.begin(), c.indices.end());
  std::sort(column_pts.begin(), column_pts.end());
  const std::vector<int> wall_pool = minus(rest, column_pts);
  seg.walls = extract_wall_planes(cloud, params.walls, wall_pool);

  std::vector<int> wall_pts;
  for (const auto& w : seg.walls) wall_pts.insert(wall_pts.end(), w.indices.begin(), w.indices.end());
  std::sort(wall_pts.begin(), wall_pts.end());
  seg.unassigned = minus(wall_pool, wall_pts);
  return seg;
}

}  // namespace mavi
