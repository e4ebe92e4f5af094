#include "mavi/trajectory/cost.hpp"

#include <cmath>

namespace mavi {

void OptWeights::validate() const {
  if (lambda_c < 0 || lambda_s < 0 || lambda_d < 0 || w_v < 0 || w_a < 0 || w_j < 0) {
    throw InvalidInput("optimization weights must be non-negative");
  }
  if (!(safe_distance > 0.0)) throw InvalidInput("safe distance must be positive");
  if (!(limits.v_max > 0 && limits.a_max > 0 && limits.j_max > 0)) {
    throw InvalidInput("dynamic limits must be positive");
  }
}

double collision_distance(const Vec3& q, const Vec3& p, const Vec3& v) { return std::abs((q - p).dot(v)); }

ScalarCost collision_cost(double d, double sf, bool literal) {
  ScalarCost c;
  if (literal) {
    if (d > 1.5 * sf) return c;
    if (d > sf) return {3.0 * (sf - d), -3.0};
    const double e = sf - d;
    return {e * e * e, -3.0 * e * e};
  }
  if (d > 1.5 * sf) return c;
  if (d > sf) {
    const double e = 1.5 * sf - d;
    return {3.0 * e * e, -6.0 * e};
  }
  const double e = sf - d;
  return {e * e * e + 3.0 * sf * e + 0.75 * sf * sf, -3.0 * e * e - 3.0 * sf};
}

double feasibility_penalty(const Vec3& c, double cm, Vec3* grad) {
  const double n = c.norm();
  if (n <= cm) {
    if (grad) grad->setZero();
    return 0.0;
  }
  if (n < 2.0 * cm) {
    const double e = n - cm;
    if (grad) *grad = 3.0 * e * e * c / n;
    return e * e * e;
  }
  if (grad) *grad = 2.0 * c;
  return n * n;
}

EscapeInfo nearest_obstacle(const VoxelGrid& grid, const Vec3& q, double radius) {
  EscapeInfo best;
  const double r = grid.resolution();
  const VoxelKey c = grid.key_of(q);
  const int span = static_cast<int>(std::ceil(radius / r)) + 1;
  double best_d2 = radius * radius;
  VoxelKey best_key{};
  for (int dx = -span; dx <= span; ++dx) {
    for (int dy = -span; dy <= span; ++dy) {
      for (int dz = -span; dz <= span; ++dz) {
        const VoxelKey k{c.x + dx, c.y + dy, c.z + dz};
        if (!grid.is_obstacle(k)) continue;
        const Aabb box = grid.box_of(k);
        const Vec3 p = q.cwiseMax(box.min).cwiseMin(box.max);
        const double d2 = (q - p).squaredNorm();
        if (d2 < best_d2 || (!best.active && d2 <= best_d2)) {
          best_d2 = d2;
          best.active = true;
          best.p = p;
          best_key = k;
        }
      }
    }
  }
  if (best.active) {
    Vec3 dir = q - best.p;
    if (dir.norm() < 1e-9) dir = q - grid.center_of(best_key);
    best.v = dir.norm() > 1e-12 ? dir.normalized() : Vec3::UnitZ();
  }
  return best;
}

std::vector<EscapeInfo> compute_escape_info(const BSplineTrajectory& traj, const VoxelGrid& grid, double radius) {
  std::vector<EscapeInfo> out;
  out.reserve(traj.control.size());
  for (const auto& q : traj.control) out.push_back(nearest_obstacle(grid, q, radius));
  return out;
}

CostTerms cost_and_grad(const BSplineTrajectory& traj, const std::vector<EscapeInfo>& escape,
                        const OptWeights& w, std::vector<Vec3>* grad) {
  const auto& Q = traj.control;
  const std::size_t N = Q.size();
  const double dt = traj.dt;
  CostTerms t;
  if (grad) grad->assign(N, Vec3::Zero());
  auto add = [&](std::size_t i, const Vec3& g) {
    if (grad) (*grad)[i] += g;
  };

  for (std::size_t i = 0; i < N && i < escape.size(); ++i) {
    if (!escape[i].active) continue;
    const double d = (Q[i] - escape[i].p).dot(escape[i].v);
    const ScalarCost c = collision_cost(d, w.safe_distance, w.literal_collision);
    t.collision += c.value;
    add(i, w.lambda_c * c.deriv * escape[i].v);
  }

  const double dt2 = dt * dt, dt3 = dt2 * dt;
  for (std::size_t i = 0; i + 2 < N; ++i) {
    const Vec3 a = (Q[i + 2] - 2.0 * Q[i + 1] + Q[i]) / dt2;
    t.smoothness += a.squaredNorm();
    const Vec3 g = w.lambda_s * 2.0 * a / dt2;
    add(i, g), add(i + 1, -2.0 * g), add(i + 2, g);

    Vec3 gb;
    t.feasibility += w.w_a * feasibility_penalty(a, w.limits.a_max, &gb);
    const Vec3 h = w.lambda_d * w.w_a * gb / dt2;
    add(i, h), add(i + 1, -2.0 * h), add(i + 2, h);
  }
  for (std::size_t i = 0; i + 3 < N; ++i) {
    const Vec3 j = (Q[i + 3] - 3.0 * Q[i + 2] + 3.0 * Q[i + 1] - Q[i]) / dt3;
    t.smoothness += j.squaredNorm();
    const Vec3 g = w.lambda_s * 2.0 * j / dt3;
    add(i, -g), add(i + 1, 3.0 * g), add(i + 2, -3.0 * g), add(i + 3, g);

    Vec3 gb;
    t.feasibility += w.w_j * feasibility_penalty(j, w.limits.j_max, &gb);
    const Vec3 h = w.lambda_d * w.w_j * gb / dt3;
    add(i, -h), add(i + 1, 3.0 * h), add(i + 2, -3.0 * h), add(i + 3, h);
  }
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const Vec3 v = (Q[i + 1] - Q[i]) / dt;
    Vec3 gb;
    t.feasibility += w.w_v * feasibility_penalty(v, w.limits.v_max, &gb);
    const Vec3 h = w.lambda_d * w.w_v * gb / dt;
    add(i, -h), add(i + 1, h);
  }

  t.total = w.lambda_c * t.collision + w.lambda_s * t.smoothness + w.lambda_d * t.feasibility;
  return t;
}

}  // namespace mavi
