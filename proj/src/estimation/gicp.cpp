#include "mavi/estimation/gicp.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "mavi/geometry/so3.hpp"

namespace mavi {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

}  // namespace

void GicpConfig::validate() const {
  if (voxel_size < 0 || !(lambda > 0) || !(weight > 0)) {
    throw InvalidInput("GICP voxel size must be >= 0, lambda and weight > 0");
  }
  if (neighbors < 3 || max_iterations < 1 || !(max_correspondence > 0)) throw InvalidInput("bad GICP config");
}

GicpMap::GicpMap(const PointCloud& cloud, const GicpConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  points_ = cfg.voxel_size > 0 ? voxel_downsample(cloud, cfg.voxel_size).points : cloud.points;
  tree_ = KdTree(points_);
  entries_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    Entry& e = entries_[i];
    e.q = points_[i];
    const auto nn = tree_.knn(points_[i], cfg.neighbors);
    Vec3 mean = Vec3::Zero();
    for (const auto& [j, d2] : nn) mean += points_[j];
    mean /= static_cast<double>(nn.size());
    for (const auto& [j, d2] : nn) {
      const Vec3 d = points_[j] - mean;
      e.cov += d * d.transpose();
    }
    e.cov /= static_cast<double>(nn.size());
    const Mat3 inv = (e.cov + cfg.lambda * Mat3::Identity()).inverse();
    e.info = cfg.weight * inv / inv.norm();
  }
}

const GicpMap::Entry* GicpMap::nearest(const Vec3& x, double max_dist) const {
  if (entries_.empty()) return nullptr;
  const auto [i, d2] = tree_.nearest(x);
  if (i < 0 || d2 > max_dist * max_dist) return nullptr;
  return &entries_[i];
}

GicpResult gicp_register(const PointCloud& scan, const GicpMap& map, const Pose& T0) {
  if (scan.empty()) throw InvalidInput("GICP scan is empty");
  const GicpConfig& cfg = map.config();
  GicpResult res;
  Pose T = T0;

  // Match once per iteration, then backtrack along the Gauss-Newton step on
  // the cost with those matches fixed.
  std::vector<std::pair<const Vec3*, const GicpMap::Entry*>> pairs;
  auto fixed_cost = [&](const Pose& P) {
    double c = 0.0;
    for (const auto& [p, m] : pairs) {
      const Vec3 e = m->q - P.apply(*p);
      c += e.dot(m->info * e);
    }
    return c;
  };
  for (int it = 0; it < cfg.max_iterations; ++it) {
    pairs.clear();
    for (const auto& p : scan.points)
      if (const auto* m = map.nearest(T.apply(p), cfg.max_correspondence)) pairs.emplace_back(&p, m);
    ++res.iterations;
    res.correspondences = static_cast<int>(pairs.size());
    if (pairs.size() < 10) {
      res.pose = T;
      return res;
    }
    Mat6 H = Mat6::Zero();
    Vec6 g = Vec6::Zero();
    for (const auto& [p, m] : pairs) {
      const Vec3 x = T.apply(*p);
      Eigen::Matrix<double, 3, 6> J;
      J.leftCols<3>() = so3::skew(x);
      J.rightCols<3>() = -Mat3::Identity();
      const Eigen::Matrix<double, 6, 3> JtW = J.transpose() * m->info;
      H += JtW * J;
      g += JtW * (m->q - x);
    }
    Vec6 d = -(H + 1e-12 * Mat6::Identity()).ldlt().solve(g);
    if (!d.allFinite()) break;
    const double c0 = fixed_cost(T);
    bool accepted = false;
    for (int k = 0; k < 20; ++k) {
      const Mat3 dR = so3::exp(d.head<3>());
      const Pose trial = Pose::from(so3::orthonormalize(dR * T.rotation), dR * T.translation + d.tail<3>());
      if (fixed_cost(trial) <= c0) {
        T = trial;
        accepted = true;
        break;
      }
      d *= 0.5;
    }
    if (!accepted || d.norm() < cfg.tolerance) break;
  }
  res.pose = T;
  res.cost = gicp_cost(scan, map, T);
  res.ok = true;
  return res;
}

double gicp_cost(const PointCloud& scan, const GicpMap& map, const Pose& T) {
  double cost = 0.0;
  for (const auto& p : scan.points) {
    const Vec3 x = T.apply(p);
    const auto* m = map.nearest(x, map.config().max_correspondence);
    if (!m) continue;
    const Vec3 e = m->q - x;
    cost += e.dot(m->info * e);
  }
  return cost;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0)) throw InvalidInput("voxel size must be positive");
  std::map<std::tuple<int, int, int>, std::pair<Vec3, int>> acc;
  for (const auto& p : cloud.points) {
    const std::tuple<int, int, int> k{static_cast<int>(std::floor(p.x() / voxel)),
                                      static_cast<int>(std::floor(p.y() / voxel)),
                                      static_cast<int>(std::floor(p.z() / voxel))};
    auto& [sum, n] = acc.try_emplace(k, Vec3::Zero(), 0).first->second;
    sum += p;
    ++n;
  }
  PointCloud out;
  out.points.reserve(acc.size());
  for (const auto& [k, v] : acc) out.points.push_back(v.first / v.second);
  return out;
}

}  // namespace mavi
