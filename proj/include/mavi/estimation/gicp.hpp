#pragma once

#include <vector>

#include "mavi/geometry/kdtree.hpp"
#include "mavi/geometry/point_cloud.hpp"

namespace mavi {

struct GicpConfig {
  double voxel_size = 0.0;  // map downsampling leaf; 0 keeps every point
  double weight = 1.0;      // w
  double lambda = 1e-3;     // regularizer on C
  int neighbors = 10;       // points used for each local covariance
  int max_iterations = 50;
  double tolerance = 1e-9;  // on the update step norm
  double max_correspondence = 1.0;

  void validate() const;
};

/// Map points q with local covariance C and the normalized information
/// w (C + lambda I)^-1 / |(C + lambda I)^-1|_F.
class GicpMap {
 public:
  struct Entry {
    Vec3 q = Vec3::Zero();
    Mat3 cov = Mat3::Zero();
    Mat3 info = Mat3::Zero();
  };

  GicpMap(const PointCloud& cloud, const GicpConfig& cfg);
  // The tree borrows points_, so copies are not allowed; moves keep the buffer.
  GicpMap(const GicpMap&) = delete;
  GicpMap& operator=(const GicpMap&) = delete;
  GicpMap(GicpMap&&) = default;
  GicpMap& operator=(GicpMap&&) = default;

  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<Vec3>& points() const { return points_; }
  const GicpConfig& config() const { return cfg_; }

  /// Nearest map entry within max_dist, or nullptr.
  const Entry* nearest(const Vec3& x, double max_dist) const;

 private:
  GicpConfig cfg_;
  std::vector<Vec3> points_;
  std::vector<Entry> entries_;
  KdTree tree_;
};

struct GicpResult {
  Pose pose;
  bool ok = false;
  int iterations = 0;
  int correspondences = 0;
  double cost = 0.0;  // sum of D_i at the result
};

/// Gauss-Newton on T minimizing sum_i (q_i - T p_i)^T W_i (q_i - T p_i), with
/// q_i the nearest map point to T p_i, re-found every iteration.
GicpResult gicp_register(const PointCloud& scan, const GicpMap& map, const Pose& T0);

/// Sum of D_i with correspondences found at T.
double gicp_cost(const PointCloud& scan, const GicpMap& map, const Pose& T);

/// Centroid of the points in each occupied voxel, ordered by voxel.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

}  // namespace mavi
