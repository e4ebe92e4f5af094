#include "mavi/trajectory/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <ceres/ceres.h>

namespace mavi {

TrajectoryAudit audit_trajectory(const BSplineTrajectory& traj, const VoxelGrid& grid, const OptWeights& w) {
  TrajectoryAudit a;
  const double radius = 1.5 * w.safe_distance + grid.resolution();
  a.min_distance = radius;
  for (const auto& q : traj.control) {
    const EscapeInfo e = nearest_obstacle(grid, q, radius);
    if (e.active) a.min_distance = std::min(a.min_distance, (q - e.p).norm());
  }
  const ControlDynamics d = bspline_dynamics(traj);
  for (const auto& v : d.v) a.max_v = std::max(a.max_v, v.norm());
  for (const auto& x : d.a) a.max_a = std::max(a.max_a, x.norm());
  for (const auto& x : d.j) a.max_j = std::max(a.max_j, x.norm());
  a.collision_ok = a.min_distance > w.safe_distance;
  a.dynamics_ok = a.max_v <= w.limits.v_max && a.max_a <= w.limits.a_max && a.max_j <= w.limits.j_max;
  return a;
}

namespace {

class ControlPointCost final : public ceres::FirstOrderFunction {
 public:
  ControlPointCost(const BSplineTrajectory& base, const std::vector<EscapeInfo>& escape, const OptWeights& w)
      : base_(base), escape_(escape), w_(w), first_(base.degree),
        count_(static_cast<int>(base.control.size()) - 2 * base.degree) {}

  bool Evaluate(const double* x, double* cost, double* gradient) const override {
    BSplineTrajectory t = base_;
    for (int k = 0; k < count_; ++k) t.control[first_ + k] = Vec3(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
    std::vector<Vec3> g;
    *cost = cost_and_grad(t, escape_, w_, gradient ? &g : nullptr).total;
    if (gradient) {
      for (int k = 0; k < count_; ++k)
        for (int c = 0; c < 3; ++c) gradient[3 * k + c] = g[first_ + k](c);
    }
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return 3 * count_; }

 private:
  const BSplineTrajectory& base_;
  const std::vector<EscapeInfo>& escape_;
  const OptWeights& w_;
  int first_;
  int count_;
};

double free_gradient_norm(const BSplineTrajectory& t, const std::vector<EscapeInfo>& esc, const OptWeights& w) {
  std::vector<Vec3> g;
  cost_and_grad(t, esc, w, &g);
  double m = 0.0;
  for (std::size_t i = t.degree; i + t.degree < t.control.size(); ++i) m = std::max(m, g[i].cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

OptimizeResult optimize(const BSplineTrajectory& input, const VoxelGrid& grid, const OptWeights& w,
                        const OptimizerOptions& opts) {
  input.validate();
  w.validate();
  OptimizeResult res;
  res.traj = input;
  BSplineTrajectory& traj = res.traj;
  const int count = static_cast<int>(traj.control.size()) - 2 * traj.degree;
  const double radius = 1.5 * w.safe_distance + grid.resolution();

  if (count > 0) {
    std::vector<double> x(3 * count);
    while (res.iterations < opts.max_iterations) {
      const auto escape = compute_escape_info(traj, grid, radius);
      if (free_gradient_norm(traj, escape, w) < opts.gradient_tol) {
        res.converged = true;
        break;
      }
      for (int k = 0; k < count; ++k)
        for (int c = 0; c < 3; ++c) x[3 * k + c] = traj.control[traj.degree + k](c);

      ceres::GradientProblemSolver::Options o;
      o.line_search_direction_type = ceres::LBFGS;
      o.max_num_iterations = std::min(opts.refresh_every, opts.max_iterations - res.iterations);
      o.gradient_tolerance = opts.gradient_tol;
      o.function_tolerance = 1e-14;
      o.parameter_tolerance = 1e-14;
      o.logging_type = ceres::SILENT;
      ceres::GradientProblem problem(new ControlPointCost(traj, escape, w));
      ceres::GradientProblemSolver::Summary summary;
      ceres::Solve(o, problem, x.data(), &summary);
      const int used = std::max(1, static_cast<int>(summary.iterations.size()) - 1);
      res.iterations += used;
      for (int k = 0; k < count; ++k) traj.control[traj.degree + k] = Vec3(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
      if (summary.termination_type == ceres::CONVERGENCE && summary.iterations.size() <= 1) {
        // No progress possible with this linearisation.
        res.converged = free_gradient_norm(traj, compute_escape_info(traj, grid, radius), w) < opts.gradient_tol;
        break;
      }
    }
  } else {
    res.converged = true;
  }

  res.audit = audit_trajectory(traj, grid, w);
  if (!res.audit.dynamics_ok && opts.retime) {
    const double s = std::max({1.0, res.audit.max_v / w.limits.v_max, std::sqrt(res.audit.max_a / w.limits.a_max),
                               std::cbrt(res.audit.max_j / w.limits.j_max)});
    traj.dt *= s * (1.0 + 1e-9);
    res.retimed = true;
    res.audit = audit_trajectory(traj, grid, w);
  }
  res.cost = cost_and_grad(traj, compute_escape_info(traj, grid, radius), w).total;
  if (!res.audit.collision_ok || !res.audit.dynamics_ok) {
    std::ostringstream os;
    if (!res.audit.collision_ok) os << "clearance " << res.audit.min_distance << " <= " << w.safe_distance << "; ";
    if (!res.audit.dynamics_ok)
      os << "dynamics v=" << res.audit.max_v << " a=" << res.audit.max_a << " j=" << res.audit.max_j;
    res.report = os.str();
  }
  return res;
}

}  // namespace mavi
