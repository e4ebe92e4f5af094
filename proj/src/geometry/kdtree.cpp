#include "mavi/geometry/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace mavi {

KdTree::KdTree(std::span<const Vec3> points) : points_(points) {
  index_.resize(points.size());
  std::iota(index_.begin(), index_.end(), 0);
  if (!index_.empty()) {
    nodes_.reserve(2 * index_.size() / kLeafSize + 2);
    build(0, static_cast<int>(index_.size()), 0);
  }
}

int KdTree::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[index_[begin]];
  Vec3 hi = lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[index_[i]]);
    hi = hi.cwiseMax(points_[index_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[index_[mid]][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::radius_search(const Vec3& query, double radius, std::vector<int>& out) const {
  out.clear();
  if (nodes_.empty()) return;
  const double r2 = radius * radius;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = index_[i];
        if ((points_[idx] - query).squaredNorm() <= r2) out.push_back(idx);
      }
      continue;
    }
    const double diff = query[n.axis] - n.split;
    if (diff <= radius) stack.push_back(n.left);
    if (diff >= -radius) stack.push_back(n.right);
  }
}

std::pair<int, double> KdTree::nearest(const Vec3& query) const {
  auto res = knn(query, 1);
  if (res.empty()) return {-1, std::numeric_limits<double>::infinity()};
  return res.front();
}

std::vector<std::pair<int, double>> KdTree::knn(const Vec3& query, int k) const {
  std::vector<std::pair<int, double>> result;
  if (nodes_.empty() || k <= 0) return result;
  // Max-heap on distance holds the current best k.
  auto cmp = [](const std::pair<int, double>& a, const std::pair<int, double>& b) {
    return a.second < b.second;
  };
  std::priority_queue<std::pair<int, double>, std::vector<std::pair<int, double>>, decltype(cmp)>
      best(cmp);
  auto worst = [&]() {
    return static_cast<int>(best.size()) < k ? std::numeric_limits<double>::infinity()
                                             : best.top().second;
  };

  struct Item {
    int node;
    double bound;
  };
  std::vector<Item> stack{{0, 0.0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    if (it.bound > worst()) continue;
    const Node& n = nodes_[it.node];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = index_[i];
        const double d2 = (points_[idx] - query).squaredNorm();
        if (d2 < worst()) {
          best.emplace(idx, d2);
          if (static_cast<int>(best.size()) > k) best.pop();
        }
      }
      continue;
    }
    const double diff = query[n.axis] - n.split;
    const int near = diff <= 0.0 ? n.left : n.right;
    const int far = diff <= 0.0 ? n.right : n.left;
    stack.push_back({far, diff * diff});
    stack.push_back({near, 0.0});
  }
  result.reserve(best.size());
  while (!best.empty()) {
    result.push_back(best.top());
    best.pop();
  }
  std::reverse(result.begin(), result.end());
  return result;
}

}  // namespace mavi
