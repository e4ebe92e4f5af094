#include "mavi/perception/walls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mavi/perception/clustering.hpp"
#include "mavi/perception/normals.hpp"

namespace mavi {

Vec3 solve_constrained_normal(const Mat3& A, const Vec3& b, double kappa) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  const Vec3 lam = es.eigenvalues();
  const Mat3 Q = es.eigenvectors();
  const Vec3 c = Q.transpose() * (0.5 * kappa * b);
  const double cn = c.norm();
  if (cn <= 1e-15 * std::max(1.0, lam.cwiseAbs().maxCoeff())) return Q.col(0);

  // Stationary points satisfy (A - mu I) n = c with mu <= lambda_min at the
  // global minimum; solve ||n(mu)|| = 1 by bisection on the secular equation.
  auto norm2 = [&](double mu) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += c(k) * c(k) / ((lam(k) - mu) * (lam(k) - mu));
    return s;
  };
  const double tiny = 1e-14 * std::max(1.0, std::abs(lam(0)));
  if (std::abs(c(0)) <= tiny) {
    // Hard case: the smallest eigenvector is orthogonal to b.
    double s = 0.0;
    Vec3 y = Vec3::Zero();
    for (int k = 1; k < 3; ++k) {
      const double gap = lam(k) - lam(0);
      if (gap > tiny) {
        y(k) = c(k) / gap;
        s += y(k) * y(k);
      }
    }
    if (s <= 1.0) {
      y(0) = std::sqrt(1.0 - s);
      return (Q * y).normalized();
    }
  }
  double lo = lam(0) - cn, hi = lam(0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (norm2(mid) > 1.0) hi = mid;
    else lo = mid;
  }
  const double mu = lo;
  Vec3 y;
  for (int k = 0; k < 3; ++k) {
    const double den = lam(k) - mu;
    y(k) = std::abs(den) > 0.0 ? c(k) / den : (c(k) >= 0 ? 1.0 : -1.0);
  }
  return (Q * y).normalized();
}

WallFit fit_wall_plane(const PointCloud& cloud, std::span<const int> indices, double kappa,
                       const std::optional<Vec3>& align) {
  if (indices.size() < 3) throw InvalidInput("wall fit needs at least 3 points");
  if (!cloud.has_normals()) throw InvalidInput("wall fit needs normals");
  if (kappa < 0.0) throw InvalidInput("kappa must be non-negative");
  Vec3 mean = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  for (int i : indices) {
    mean += cloud.points[i];
    Vec3 n = cloud.normals[i];
    if (align && n.dot(*align) < 0.0) n = -n;
    b += n;
  }
  mean /= static_cast<double>(indices.size());
  Mat3 A = Mat3::Zero();
  for (int i : indices) {
    const Vec3 q = cloud.points[i] - mean;
    A += q * q.transpose();
  }
  WallFit fit;
  fit.plane.normal = solve_constrained_normal(A, b, kappa);
  fit.plane.d = -fit.plane.normal.dot(mean);
  for (int i : indices) {
    Vec3 n = cloud.normals[i];
    if (align && n.dot(*align) < 0.0) n = -n;
    const double e = fit.plane.signed_distance(cloud.points[i]);
    fit.distance_term += e * e;
    fit.normal_term += 1.0 - n.dot(fit.plane.normal);
  }
  fit.plane.inliers.assign(indices.begin(), indices.end());
  return fit;
}

namespace {

std::vector<int> wall_inliers(const PointCloud& cloud, const std::vector<int>& pool, const Vec3& n,
                              double d, const WallParams& params) {
  const double cos_tol = std::cos(params.normal_angle);
  std::vector<int> out;
  for (int i : pool) {
    if (std::abs(n.dot(cloud.points[i]) + d) <= params.dist_thresh &&
        std::abs(n.dot(cloud.normals[i])) >= cos_tol) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

std::vector<StructureInstance> extract_wall_planes(const PointCloud& input, const WallParams& params,
                                                   std::span<const int> indices) {
  std::vector<StructureInstance> walls;
  std::vector<int> remaining;
  if (indices.empty()) {
    remaining.resize(input.size());
    std::iota(remaining.begin(), remaining.end(), 0);
  } else {
    remaining.assign(indices.begin(), indices.end());
    std::sort(remaining.begin(), remaining.end());
  }
  if (static_cast<int>(remaining.size()) < std::max(params.min_inliers, 3)) return walls;

  const PointCloud* cloud = &input;
  PointCloud with_normals;
  if (!input.has_normals()) {
    with_normals = input;
    with_normals.normals = estimate_normals(input, 12, input.centroid());
    cloud = &with_normals;
  }

  std::mt19937_64 rng(params.seed);
  for (int round = 0; round < params.max_rounds; ++round) {
    if (static_cast<int>(remaining.size()) < params.min_inliers) break;

    // Score hypotheses on a subsample, then recount the winner in full.
    std::vector<int> sample = remaining;
    if (sample.size() > 3000) {
      std::shuffle(sample.begin(), sample.end(), rng);
      sample.resize(3000);
    }
    std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
    int best_seed = -1;
    std::size_t best_score = 0;
    for (int h = 0; h < params.hypotheses; ++h) {
      const int s = remaining[pick(rng)];
      const Vec3& n = cloud->normals[s];
      if (std::abs(n.z()) >= params.vertical_max) continue;
      const double d = -n.dot(cloud->points[s]);
      const std::size_t score = wall_inliers(*cloud, sample, n, d, params).size();
      if (score > best_score) best_score = score, best_seed = s;
    }
    if (best_seed < 0) break;

    Vec3 n = cloud->normals[best_seed];
    double d = -n.dot(cloud->points[best_seed]);
    std::vector<int> inl = wall_inliers(*cloud, remaining, n, d, params);
    if (static_cast<int>(inl.size()) < params.min_inliers) break;
    for (int pass = 0; pass < 2; ++pass) {
      const WallFit fit = fit_wall_plane(*cloud, inl, params.kappa, n);
      auto next = wall_inliers(*cloud, remaining, fit.plane.normal, fit.plane.d, params);
      if (next.size() < 3) break;
      n = fit.plane.normal;
      d = fit.plane.d;
      inl = std::move(next);
    }

    if (std::abs(n.z()) < params.vertical_max) {
      std::vector<Vec3> pos;
      pos.reserve(inl.size());
      for (int i : inl) pos.push_back(cloud->points[i]);
      for (const auto& comp : cluster_euclidean(pos, params.component_gap)) {
        if (static_cast<int>(comp.size()) < params.min_inliers) continue;
        std::vector<int> ids;
        ids.reserve(comp.size());
        for (int j : comp) ids.push_back(inl[j]);
        std::sort(ids.begin(), ids.end());
        StructureInstance w;
        w.kind = StructureKind::Wall;
        w.plane = fit_wall_plane(*cloud, ids, params.kappa, n).plane;
        w.indices = ids;
        walls.push_back(std::move(w));
      }
    }
    std::vector<int> keep;
    std::sort(inl.begin(), inl.end());
    std::set_difference(remaining.begin(), remaining.end(), inl.begin(), inl.end(),
                        std::back_inserter(keep));
    remaining.swap(keep);
  }
  return walls;
}

}  // namespace mavi
