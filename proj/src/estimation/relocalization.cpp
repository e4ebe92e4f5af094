#include "mavi/estimation/relocalization.hpp"

#include <algorithm>
#include <cmath>

#include "mavi/geometry/so3.hpp"

namespace mavi {

namespace {

double fitness(const PointCloud& src, const KdTree& tree, const Pose& T, double inlier) {
  int hits = 0;
  for (const auto& p : src.points)
    if (tree.nearest(T.apply(p)).second <= inlier * inlier) ++hits;
  return src.empty() ? 0.0 : static_cast<double>(hits) / src.size();
}

}  // namespace

RelocalizationResult global_relocalize(const PointCloud& M_mvs, const PointCloud& M_prior,
                                       const RelocalizationConfig& cfg, const Pose* hint) {
  if (M_mvs.empty() || M_prior.empty()) throw InvalidInput("relocalization needs two non-empty clouds");
  const PointCloud src = voxel_downsample(M_prior, cfg.sample_voxel);
  const PointCloud src_coarse = voxel_downsample(M_prior, cfg.coarse.voxel_size);
  const GicpMap coarse(M_mvs, cfg.coarse);
  const GicpMap fine(M_mvs, cfg.fine);
  const KdTree tree(M_mvs.points);
  const Vec3 cm = M_mvs.centroid(), cp = src.centroid();

  std::vector<Pose> seeds;
  if (hint) seeds.push_back(*hint);
  const int K = std::max(1, cfg.yaw_candidates);
  for (int k = 0; k < K; ++k) {
    const Mat3 R = so3::from_ypr(2.0 * M_PI * k / K, 0.0, 0.0);
    seeds.push_back(Pose::from(R, cm - R * cp));
    seeds.push_back(Pose::from(R, Vec3::Zero()));
  }

  std::vector<std::pair<double, Pose>> ranked;
  for (const Pose& s : seeds) {
    const GicpResult c = gicp_register(src_coarse, coarse, s);
    if (c.ok) ranked.emplace_back(fitness(src, tree, c.pose, 2.0 * cfg.inlier_distance), c.pose);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  // Many seeds land on the same pose; keep distinct ones only.
  std::vector<std::pair<double, Pose>> distinct;
  for (const auto& r : ranked) {
    bool dup = false;
    for (const auto& d : distinct)
      dup = dup || ((r.second.translation - d.second.translation).norm() < 0.25 &&
                    rotation_angle_between(r.second, d.second) < 5.0 * M_PI / 180);
    if (!dup) distinct.push_back(r);
    if (static_cast<int>(distinct.size()) >= cfg.refine_best) break;
  }
  ranked = std::move(distinct);

  GicpConfig tight = cfg.fine;
  tight.max_correspondence = cfg.final_correspondence;
  const GicpMap last(M_mvs, tight);
  RelocalizationResult best;
  for (const auto& [score, pose] : ranked) {
    GicpResult f = gicp_register(src, fine, pose);
    if (f.ok) f = gicp_register(src, last, f.pose);
    if (!f.ok) continue;
    const double fit = fitness(src, tree, f.pose, cfg.inlier_distance);
    if (fit > best.fitness) {
      best.fitness = fit;
      best.T_ex = f.pose;
    }
  }
  best.ok = best.fitness >= cfg.min_fitness;
  if (!best.ok) best.T_ex = hint ? *hint : Pose::identity();
  return best;
}

Relocalizer::Relocalizer(const PointCloud& prior, const RelocalizationConfig& cfg) : prior_(prior), cfg_(cfg) {
  if (prior.empty()) throw InvalidInput("prior map is empty");
  if (!(cfg.period > 0)) throw InvalidInput("relocalization period must be positive");
}

bool Relocalizer::maybe_update(double t, const PointCloud& local_map) {
  if (started_ && t - last_t_ < cfg_.period) return false;
  started_ = true;
  last_t_ = t;
  ++attempts_;
  if (local_map.empty()) {
    last_ok_ = false;
    return true;
  }
  const RelocalizationResult r = global_relocalize(local_map, prior_, cfg_, &T_ex_);
  last_ok_ = r.ok;
  if (r.ok) T_ex_ = r.T_ex;
  return true;
}

}  // namespace mavi
