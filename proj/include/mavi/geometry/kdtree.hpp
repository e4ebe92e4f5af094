#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mavi/geometry/types.hpp"

namespace mavi {

/// Static 3-D k-d tree over a borrowed point array. The points must outlive
/// the tree and must not be modified while it is in use.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }

  /// Indices of all points within `radius` of `query` (unordered).
  void radius_search(const Vec3& query, double radius, std::vector<int>& out) const;

  /// Index and squared distance of the nearest point, or {-1, inf} when empty.
  std::pair<int, double> nearest(const Vec3& query) const;

  /// Up to k nearest neighbours sorted by distance.
  std::vector<std::pair<int, double>> knn(const Vec3& query, int k) const;

 private:
  struct Node {
    int begin = 0;
    int end = 0;
    int left = -1;
    int right = -1;
    int axis = -1;
    double split = 0.0;
  };

  int build(int begin, int end, int depth);

  std::span<const Vec3> points_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
  static constexpr int kLeafSize = 12;
};

}  // namespace mavi
