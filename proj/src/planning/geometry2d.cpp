#include "mavi/planning/geometry2d.hpp"

#include <algorithm>
#include <cmath>

namespace mavi {

namespace {
double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}
}  // namespace

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

Rect2 min_area_rect(const std::vector<Vec2>& pts) {
  if (pts.empty()) throw InvalidInput("bounding rectangle of an empty set");
  const auto hull = convex_hull(pts);

  std::vector<Vec2> dirs;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
    if (e.norm() > 0) dirs.push_back(e.normalized());
  }
  if (dirs.empty()) dirs.push_back(Vec2::UnitX());

  Rect2 best;
  double best_area = std::numeric_limits<double>::infinity();
  for (const Vec2& d : dirs) {
    // Pick the side closest to local x as u.
    Vec2 u = d, v(-d.y(), d.x());
    if (std::abs(v.x()) > std::abs(u.x())) std::swap(u, v);
    if (u.x() < 0 || (u.x() == 0 && u.y() < 0)) u = -u;
    v = Vec2(-u.y(), u.x());
    double s0 = 1e300, s1 = -1e300, t0 = 1e300, t1 = -1e300;
    for (const auto& p : hull) {
      s0 = std::min(s0, p.dot(u)), s1 = std::max(s1, p.dot(u));
      t0 = std::min(t0, p.dot(v)), t1 = std::max(t1, p.dot(v));
    }
    const double area = (s1 - s0) * (t1 - t0);
    if (!std::isfinite(best_area) || area < best_area - 1e-12 * std::max(1.0, best_area) ||
        (std::abs(area - best_area) <= 1e-12 * std::max(1.0, best_area) && std::abs(u.x()) > std::abs(best.u.x()))) {
      best_area = area;
      best.u = u;
      best.v = v;
      best.origin = s0 * u + t0 * v;
      best.width = s1 - s0;
      best.height = t1 - t0;
    }
  }
  return best;
}

}  // namespace mavi
