#include "mavi/perception/clustering.hpp"

#include <algorithm>

#include "mavi/geometry/kdtree.hpp"

namespace mavi {

std::vector<std::vector<int>> cluster_euclidean(std::span<const Vec3> points, double d_thresh) {
  if (!(d_thresh > 0.0)) throw InvalidInput("cluster distance must be positive");
  std::vector<std::vector<int>> clusters;
  if (points.empty()) return clusters;
  KdTree tree(points);
  std::vector<char> seen(points.size(), 0);
  std::vector<int> frontier, nb;
  for (int seed = 0; seed < static_cast<int>(points.size()); ++seed) {
    if (seen[seed]) continue;
    std::vector<int> cluster{seed};
    seen[seed] = 1;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const int cur = frontier.back();
      frontier.pop_back();
      nb.clear();
      tree.radius_search(points[cur], d_thresh, nb);
      for (int j : nb) {
        if (seen[j]) continue;
        seen[j] = 1;
        cluster.push_back(j);
        frontier.push_back(j);
      }
    }
    std::sort(cluster.begin(), cluster.end());
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace mavi
