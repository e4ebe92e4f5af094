#include "mavi/geometry/point_cloud.hpp"

#include <cmath>
#include <string>

#include "mavi/geometry/so3.hpp"

namespace mavi {

void Pose::validate() const {
  if (!is_valid()) throw InvalidInput("pose rotation is not a proper rotation");
}

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  if (std::abs(rotation.determinant() - 1.0) > tol) return false;
  return (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol;
}

double rotation_angle_between(const Pose& a, const Pose& b) {
  return so3::log(a.rotation.transpose() * b.rotation).norm();
}

void PointCloud::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw InvalidInput("point " + std::to_string(i) + " is not finite");
    }
  }
  if (!normals.empty()) {
    if (normals.size() != points.size()) {
      throw InvalidInput("normals do not match points one to one");
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
      if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
        throw InvalidInput("normal " + std::to_string(i) + " is not unit length");
      }
    }
  }
  if (!labels.empty() && labels.size() != points.size()) {
    throw InvalidInput("labels do not match points one to one");
  }
}

PointCloud PointCloud::subset(std::span<const int> indices) const {
  PointCloud out;
  out.points.reserve(indices.size());
  if (has_normals()) out.normals.reserve(indices.size());
  if (has_labels()) out.labels.reserve(indices.size());
  for (int idx : indices) {
    out.points.push_back(points[idx]);
    if (has_normals()) out.normals.push_back(normals[idx]);
    if (has_labels()) out.labels.push_back(labels[idx]);
  }
  return out;
}

PointCloud PointCloud::transformed(const Pose& T) const {
  PointCloud out = *this;
  for (auto& p : out.points) p = T.apply(p);
  for (auto& n : out.normals) n = T.rotation * n;
  return out;
}

Vec3 PointCloud::centroid() const {
  Vec3 c = Vec3::Zero();
  if (points.empty()) return c;
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

std::pair<Vec3, Vec3> PointCloud::bounds() const {
  if (points.empty()) throw InvalidInput("bounds of an empty cloud");
  Vec3 lo = points.front();
  Vec3 hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

}  // namespace mavi
