#include "mavi/perception/normals.hpp"

#include "mavi/geometry/kdtree.hpp"

namespace mavi {

std::vector<Vec3> estimate_normals(const PointCloud& cloud, int k, const Vec3& viewpoint) {
  if (k < 3) throw InvalidInput("normal estimation needs k >= 3");
  std::vector<Vec3> normals(cloud.size(), Vec3::UnitZ());
  if (cloud.size() < 3) return normals;
  KdTree tree(cloud.points);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nb = tree.knn(cloud.points[i], k);
    Vec3 mean = Vec3::Zero();
    for (const auto& [j, d2] : nb) mean += cloud.points[j];
    mean /= static_cast<double>(nb.size());
    Mat3 cov = Mat3::Zero();
    for (const auto& [j, d2] : nb) {
      const Vec3 q = cloud.points[j] - mean;
      cov += q * q.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
    Vec3 n = es.eigenvectors().col(0).normalized();
    if (n.dot(viewpoint - cloud.points[i]) < 0.0) n = -n;
    normals[i] = n;
  }
  return normals;
}

}  // namespace mavi
