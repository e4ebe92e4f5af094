#include "mavi/perception/csf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mavi {

void CsfParams::validate() const {
  if (!(resolution > 0 && mass > 0 && gravity > 0 && spring > 0 && damping > 0 &&
        time_step > 0 && threshold > 0 && settle_tol > 0) ||
      iterations < 1) {
    throw InvalidInput("CSF parameters must be positive and iterations >= 1");
  }
}

CsfResult extract_ground_csf(const PointCloud& cloud, const CsfParams& params,
                             std::span<const int> indices) {
  params.validate();
  std::vector<int> sel;
  if (indices.empty()) {
    sel.resize(cloud.size());
    std::iota(sel.begin(), sel.end(), 0);
  } else {
    sel.assign(indices.begin(), indices.end());
  }
  if (sel.size() < 100) throw InvalidInput("CSF needs at least 100 points");

  Vec3 mean = Vec3::Zero();
  for (int i : sel) mean += cloud.points[i];
  mean /= static_cast<double>(sel.size());
  Mat3 cov = Mat3::Zero();
  for (int i : sel) {
    const Vec3 q = cloud.points[i] - mean;
    cov += q * q.transpose();
  }
  const Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(cov).eigenvalues();
  if (ev(1) <= 1e-12 * ev(2)) throw InvalidInput("CSF input is degenerate (collinear points)");
  const Vec2 hev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov.topLeftCorner<2, 2>()).eigenvalues();
  if (hev(0) <= 1e-12 * std::max(hev(1), 1e-300)) {
    throw InvalidInput("CSF input has no horizontal extent");
  }

  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
  for (int i : sel) {
    const Vec3& p = cloud.points[i];
    xmin = std::min(xmin, p.x()), xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y()), ymax = std::max(ymax, p.y());
  }
  const double res = params.resolution;
  const int cols = static_cast<int>(std::ceil((xmax - xmin) / res)) + 1;
  const int rows = static_cast<int>(std::ceil((ymax - ymin) / res)) + 1;
  const int np = cols * rows;
  auto id = [cols](int c, int r) { return r * cols + c; };

  // Collision height per particle: the highest inverted point in its cell.
  constexpr double kNone = -1e300;
  std::vector<double> ihv(np, kNone);
  for (int i : sel) {
    const Vec3& p = cloud.points[i];
    const int c = std::clamp(static_cast<int>(std::lround((p.x() - xmin) / res)), 0, cols - 1);
    const int r = std::clamp(static_cast<int>(std::lround((p.y() - ymin) / res)), 0, rows - 1);
    ihv[id(c, r)] = std::max(ihv[id(c, r)], -p.z());
  }
  // Empty cells borrow from filled neighbours, one ring at a time.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<double> next = ihv;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (ihv[id(c, r)] != kNone) continue;
        double best = kNone;
        if (c > 0) best = std::max(best, ihv[id(c - 1, r)]);
        if (c + 1 < cols) best = std::max(best, ihv[id(c + 1, r)]);
        if (r > 0) best = std::max(best, ihv[id(c, r - 1)]);
        if (r + 1 < rows) best = std::max(best, ihv[id(c, r + 1)]);
        if (best != kNone) {
          next[id(c, r)] = best;
          changed = true;
        }
      }
    }
    ihv.swap(next);
  }

  const double top = *std::max_element(ihv.begin(), ihv.end());
  std::vector<double> z(np, top + 0.5), v(np, 0.0), znew(np);
  std::vector<char> movable(np, 1);
  const double ks = params.spring / params.mass;
  const double cs = params.damping / params.mass;
  const double dt = params.time_step;

  int it = 0;
  for (; it < params.iterations; ++it) {
    double max_move = 0.0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int k = id(c, r);
        if (!movable[k]) {
          znew[k] = z[k];
          continue;
        }
        double spring = 0.0;
        if (c > 0) spring += z[id(c - 1, r)] - z[k];
        if (c + 1 < cols) spring += z[id(c + 1, r)] - z[k];
        if (r > 0) spring += z[id(c, r - 1)] - z[k];
        if (r + 1 < rows) spring += z[id(c, r + 1)] - z[k];
        const double a = -params.gravity + ks * spring - cs * v[k];
        v[k] += a * dt;
        double zn = z[k] + v[k] * dt;
        if (zn <= ihv[k]) {
          zn = ihv[k];
          v[k] = 0.0;
          movable[k] = 0;
        }
        max_move = std::max(max_move, std::abs(zn - z[k]));
        znew[k] = zn;
      }
    }
    z.swap(znew);
    if (max_move < params.settle_tol) {
      ++it;
      break;
    }
  }

  CsfResult res_out;
  res_out.iterations = it;
  res_out.cols = cols;
  res_out.rows = rows;
  res_out.cloth.resize(np);
  for (int k = 0; k < np; ++k) res_out.cloth[k] = -z[k];
  res_out.ground.kind = StructureKind::Ground;
  for (int i : sel) {
    const Vec3& p = cloud.points[i];
    const double fx = std::clamp((p.x() - xmin) / res, 0.0, cols - 1.0);
    const double fy = std::clamp((p.y() - ymin) / res, 0.0, rows - 1.0);
    const int c0 = std::min(static_cast<int>(fx), cols - 1), r0 = std::min(static_cast<int>(fy), rows - 1);
    const int c1 = std::min(c0 + 1, cols - 1), r1 = std::min(r0 + 1, rows - 1);
    const double tx = fx - c0, ty = fy - r0;
    const double h = (1 - tx) * (1 - ty) * z[id(c0, r0)] + tx * (1 - ty) * z[id(c1, r0)] +
                     (1 - tx) * ty * z[id(c0, r1)] + tx * ty * z[id(c1, r1)];
    // Corner nodes too, so points beside a step between levels still match.
    double dist = std::abs(-p.z() - h);
    for (int k : {id(c0, r0), id(c1, r0), id(c0, r1), id(c1, r1)}) dist = std::min(dist, std::abs(-p.z() - z[k]));
    if (dist <= params.threshold) res_out.ground.indices.push_back(i);
  }
  std::sort(res_out.ground.indices.begin(), res_out.ground.indices.end());
  return res_out;
}

}  // namespace mavi
