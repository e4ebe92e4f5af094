#include "mavi/perception/columns.hpp"

#include <algorithm>
#include <cmath>

namespace mavi {

std::vector<StructureInstance> classify_columns(const PointCloud& cloud,
                                                const std::vector<std::vector<int>>& clusters,
                                                const ColumnCriteria& criteria) {
  std::vector<StructureInstance> out;
  for (const auto& cl : clusters) {
    if (cl.size() < 3) continue;
    Vec2 c = Vec2::Zero();
    double zmin = 1e300, zmax = -1e300;
    for (int i : cl) {
      const Vec3& p = cloud.points[i];
      c += p.head<2>();
      zmin = std::min(zmin, p.z());
      zmax = std::max(zmax, p.z());
    }
    c /= static_cast<double>(cl.size());

    // Footprint extents along the horizontal principal axes.
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int i : cl) {
      const Vec2 q = cloud.points[i].head<2>() - c;
      cov += q * q.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const Eigen::Matrix2d axes = es.eigenvectors();
    Vec2 lo = Vec2::Constant(1e300), hi = Vec2::Constant(-1e300);
    double radius = 0.0;
    for (int i : cl) {
      const Vec2 q = cloud.points[i].head<2>() - c;
      const Vec2 uv = axes.transpose() * q;
      lo = lo.cwiseMin(uv);
      hi = hi.cwiseMax(uv);
      radius = std::max(radius, q.norm());
    }
    const Vec2 ext = hi - lo;
    const double small = std::max(ext.minCoeff(), 1e-9);
    const double aspect = ext.maxCoeff() / small;
    const double diag = ext.norm();
    const double height = zmax - zmin;
    if (aspect > criteria.aspect_max || diag > criteria.footprint_max ||
        height < criteria.height_min || radius <= 0.0) {
      continue;
    }
    StructureInstance inst;
    inst.kind = StructureKind::Column;
    inst.indices = cl;
    inst.axis = ColumnAxis{c, zmin, zmax};
    inst.radius = radius;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace mavi
