#include "mavi/harness/facility.hpp"

#include <cmath>
#include <random>

namespace mavi {

void FacilitySpec::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) throw InvalidInput("facility dimensions must be positive");
  if (columns.rows < 0 || columns.cols < 0) throw InvalidInput("column grid counts must be non-negative");
  if (columns.count() > 0 && !(columns.radius > 0.0)) throw InvalidInput("column radius must be positive");
  if (noise_sigma < 0.0) throw InvalidInput("noise sigma must be non-negative");
  if (!(point_spacing > 0.0)) throw InvalidInput("point spacing must be positive");
  const double hx = 0.5 * (columns.cols - 1) * columns.spacing_x + columns.radius;
  const double hy = 0.5 * (columns.rows - 1) * columns.spacing_y + columns.radius;
  if (columns.count() > 0 && (hx >= 0.5 * length || hy >= 0.5 * width))
    throw InvalidInput("column grid does not fit inside the hall");
  for (const auto& p : partitions)
    if ((p.b - p.a).norm() < 1e-6 || !(p.thickness > 0.0)) throw InvalidInput("degenerate partition wall");
  for (const auto& o : obstacles)
    if ((o.max.array() <= o.min.array()).any()) throw InvalidInput("obstacle box needs min < max");
}

FacilitySpec FacilitySpec::desk() { return FacilitySpec{}; }

FacilitySpec FacilitySpec::full() {
  FacilitySpec s;
  s.length = 80.0;
  s.width = 50.0;
  s.height = 7.0;
  s.columns = {3, 9, 0.4, 8.0, 12.0};
  s.partitions = {{Vec2(30.0, 44.0), Vec2(50.0, 44.0), 0.2}};
  s.noise_sigma = 0.02;
  s.point_spacing = 0.12;
  return s;
}

namespace {

class Sampler {
 public:
  Sampler(const FacilitySpec& spec, PointCloud& out)
      : spec_(spec), out_(out), rng_(spec.seed), jitter_(0.0, 1.0), noise_(0.0, 1.0) {}

  // Jittered grid over the rectangle origin + s u + t v, s in [0,|u|], t in [0,|v|].
  template <class Keep>
  void rect(const Vec3& origin, const Vec3& u, const Vec3& v, const Vec3& normal, int label, Keep&& keep) {
    const double h = spec_.point_spacing;
    const int nu = std::max(1, static_cast<int>(std::round(u.norm() / h)));
    const int nv = std::max(1, static_cast<int>(std::round(v.norm() / h)));
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) {
        const Vec3 p = origin + u * ((i + jitter_(rng_)) / nu) + v * ((j + jitter_(rng_)) / nv);
        if (!keep(p)) continue;
        emit(p, normal, label);
      }
  }

  void cylinder(const Vec2& c, double r, double z0, double z1, int label) {
    const double h = spec_.point_spacing;
    const int na = std::max(8, static_cast<int>(std::round(2.0 * M_PI * r / h)));
    const int nz = std::max(1, static_cast<int>(std::round((z1 - z0) / h)));
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nz; ++j) {
        const double th = 2.0 * M_PI * (i + jitter_(rng_)) / na;
        const double z = z0 + (z1 - z0) * (j + jitter_(rng_)) / nz;
        const Vec3 n(std::cos(th), std::sin(th), 0.0);
        emit(Vec3(c.x(), c.y(), z) + r * n, n, label);
      }
  }

 private:
  void emit(const Vec3& p, const Vec3& n, int label) {
    Vec3 q = p;
    if (spec_.noise_sigma > 0.0) q += spec_.noise_sigma * Vec3(noise_(rng_), noise_(rng_), noise_(rng_));
    out_.push_back(q, n, label);
  }

  const FacilitySpec& spec_;
  PointCloud& out_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> jitter_;
  std::normal_distribution<double> noise_;
};

}  // namespace

Facility gen_facility(const FacilitySpec& spec) {
  spec.validate();
  Facility f;
  const double L = spec.length, W = spec.width, H = spec.height, t = 0.2;
  f.interior = {Vec3::Zero(), Vec3(L, W, H)};
  f.column_radius = spec.columns.radius;
  const auto& cg = spec.columns;
  for (int r = 0; r < cg.rows; ++r)
    for (int c = 0; c < cg.cols; ++c)
      f.column_centers.emplace_back(0.5 * L + (c - 0.5 * (cg.cols - 1)) * cg.spacing_x,
                                    0.5 * W + (r - 0.5 * (cg.rows - 1)) * cg.spacing_y);

  // Solids.
  f.world.add_box({-t, -t, -t}, {L + t, W + t, 0.0}, kGroundLabel);
  f.world.add_box({-t, -t, H}, {L + t, W + t, H + t}, kRoofLabel);
  f.world.add_box({-t, -t, 0.0}, {0.0, W + t, H}, kWallLabelBase, 0);
  f.world.add_box({L, -t, 0.0}, {L + t, W + t, H}, kWallLabelBase, 1);
  f.world.add_box({0.0, -t, 0.0}, {L, 0.0, H}, kWallLabelBase, 2);
  f.world.add_box({0.0, W, 0.0}, {L, W + t, H}, kWallLabelBase, 3);
  for (std::size_t i = 0; i < f.column_centers.size(); ++i)
    f.world.add_cylinder(f.column_centers[i], cg.radius, 0.0, H, kColumnLabelBase, static_cast<int>(i));
  for (const auto& o : spec.obstacles) f.world.add_box(o.min, o.max, -1);

  // Surfaces.
  Sampler s(spec, f.cloud);
  auto outside_columns = [&](const Vec3& p) {
    for (const auto& c : f.column_centers)
      if ((p.head<2>() - c).norm() < cg.radius) return false;
    return true;
  };
  s.rect({0, 0, 0}, {L, 0, 0}, {0, W, 0}, Vec3::UnitZ(), kGroundLabel, outside_columns);
  s.rect({0, 0, H}, {L, 0, 0}, {0, W, 0}, -Vec3::UnitZ(), kRoofLabel, outside_columns);
  auto any = [](const Vec3&) { return true; };
  int wall = 0;
  s.rect({0, 0, 0}, {0, W, 0}, {0, 0, H}, Vec3::UnitX(), kWallLabelBase + wall++, any);
  s.rect({L, 0, 0}, {0, W, 0}, {0, 0, H}, -Vec3::UnitX(), kWallLabelBase + wall++, any);
  s.rect({0, 0, 0}, {L, 0, 0}, {0, 0, H}, Vec3::UnitY(), kWallLabelBase + wall++, any);
  s.rect({0, W, 0}, {L, 0, 0}, {0, 0, H}, -Vec3::UnitY(), kWallLabelBase + wall++, any);
  for (std::size_t i = 0; i < f.column_centers.size(); ++i)
    s.cylinder(f.column_centers[i], cg.radius, 0.0, H, kColumnLabelBase + static_cast<int>(i));

  for (const auto& p : spec.partitions) {
    const Vec2 d = (p.b - p.a).normalized();
    const Vec2 n2(-d.y(), d.x());
    const double h = 0.5 * p.thickness;
    const Vec2 c0 = p.a - h * n2, c1 = p.b + h * n2;
    f.world.add_box({std::min(c0.x(), c1.x()), std::min(c0.y(), c1.y()), 0.0},
                    {std::max(c0.x(), c1.x()), std::max(c0.y(), c1.y()), H}, kWallLabelBase, wall);
    const Vec3 along(p.b.x() - p.a.x(), p.b.y() - p.a.y(), 0.0);
    for (int side : {1, -1}) {
      const Vec2 o = p.a + side * h * n2;
      s.rect({o.x(), o.y(), 0.0}, along, {0, 0, H}, Vec3(side * n2.x(), side * n2.y(), 0.0), kWallLabelBase + wall++, any);
    }
  }
  f.wall_count = wall;
  return f;
}

}  // namespace mavi
