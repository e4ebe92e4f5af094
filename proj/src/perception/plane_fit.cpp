#include "mavi/perception/plane_fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mavi {

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Ground: return "ground";
    case StructureKind::Roof: return "roof";
    case StructureKind::Column: return "column";
    case StructureKind::Wall: return "wall";
  }
  return "unknown";
}

double Plane::distance(const Vec3& p) const { return std::abs(signed_distance(p)); }

bool Plane::is_normalized(double tol) const { return std::abs(normal.squaredNorm() - 1.0) <= tol; }

void orient_up(Plane& plane) {
  const Vec3& n = plane.normal;
  double key = n.z();
  if (std::abs(key) < 1e-12) key = n.x();
  if (std::abs(key) < 1e-12) key = n.y();
  if (key < 0.0) {
    plane.normal = -plane.normal;
    plane.d = -plane.d;
  }
}

Plane fit_plane_least_squares(std::span<const Vec3> points) {
  if (points.size() < 3) throw InvalidInput("plane fit needs at least 3 points");
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 ev = es.eigenvalues();
  if (ev(1) <= 1e-12 * std::max(ev(2), 1e-300) || ev(2) <= 0.0) {
    throw InvalidInput("plane fit on collinear or coincident points");
  }
  Plane pl;
  pl.normal = es.eigenvectors().col(0).normalized();
  pl.d = -pl.normal.dot(mean);
  return pl;
}

namespace {

std::vector<int> collect_inliers(std::span<const Vec3> points, const Vec3& n, double d,
                                 double thresh) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    if (std::abs(n.dot(points[i]) + d) <= thresh) out.push_back(i);
  }
  return out;
}

bool axis_ok(const Vec3& n, const RansacOptions& opts) {
  if (!opts.axis) return true;
  return std::abs(n.dot(opts.axis->normalized())) >= std::cos(opts.max_axis_angle) - 1e-12;
}

}  // namespace

Plane fit_plane_ransac(std::span<const Vec3> points, double dist_thresh, const RansacOptions& opts) {
  if (points.size() < 3) throw InvalidInput("RANSAC needs at least 3 points");
  if (!(dist_thresh > 0.0)) throw InvalidInput("RANSAC distance threshold must be positive");
  const int n = static_cast<int>(points.size());

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  Vec3 best_n = Vec3::Zero();
  double best_d = 0.0;
  std::size_t best_count = 0;
  double needed = opts.max_iterations;

  const Vec3 scale_ref = points[0];
  double extent = 0.0;
  for (const auto& p : points) extent = std::max(extent, (p - scale_ref).norm());

  for (int it = 0; it < std::min<double>(needed, opts.max_iterations); ++it) {
    int a, b, c;
    if (n == 3) {
      a = 0, b = 1, c = 2;
    } else {
      a = pick(rng), b = pick(rng), c = pick(rng);
      if (a == b || b == c || a == c) continue;
    }
    const Vec3 cr = (points[b] - points[a]).cross(points[c] - points[a]);
    if (cr.norm() <= 1e-12 * std::max(extent * extent, 1e-300)) continue;
    const Vec3 nn = cr.normalized();
    if (!axis_ok(nn, opts)) continue;
    const double dd = -nn.dot(points[a]);
    std::size_t count = 0;
    for (const auto& p : points) count += std::abs(nn.dot(p) + dd) <= dist_thresh;
    if (count > best_count) {
      best_count = count;
      best_n = nn;
      best_d = dd;
      const double w = static_cast<double>(count) / n;
      const double denom = std::log(std::max(1e-12, 1.0 - w * w * w));
      needed = denom < 0.0 ? std::log(1.0 - opts.confidence) / denom : 1.0;
      needed = std::max(needed, 1.0);
    }
    if (n == 3) break;
  }
  if (best_count < 3) throw InvalidInput("RANSAC found no non-degenerate plane");

  Plane pl;
  pl.normal = best_n;
  pl.d = best_d;
  pl.inliers = collect_inliers(points, best_n, best_d, dist_thresh);
  // Least-squares refinement, kept only if it does not lose support.
  for (int round = 0; round < 3 && pl.inliers.size() >= 3; ++round) {
    std::vector<Vec3> sel;
    sel.reserve(pl.inliers.size());
    for (int i : pl.inliers) sel.push_back(points[i]);
    Plane ls;
    try {
      ls = fit_plane_least_squares(sel);
    } catch (const InvalidInput&) {
      break;
    }
    if (!axis_ok(ls.normal, opts)) break;
    auto in = collect_inliers(points, ls.normal, ls.d, dist_thresh);
    if (in.size() < pl.inliers.size()) break;
    const bool same = in == pl.inliers;
    pl.normal = ls.normal;
    pl.d = ls.d;
    pl.inliers = std::move(in);
    if (same) break;
  }
  orient_up(pl);
  return pl;
}

}  // namespace mavi
