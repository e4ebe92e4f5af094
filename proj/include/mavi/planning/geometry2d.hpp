#pragma once

#include <vector>

#include "mavi/geometry/types.hpp"

namespace mavi {

/// Counter-clockwise hull without collinear points (Andrew's monotone chain).
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

/// Rectangle origin + s*u*width + t*v*height for s,t in [0,1]; u, v orthonormal.
struct Rect2 {
  Vec2 origin = Vec2::Zero();
  Vec2 u = Vec2::UnitX();
  Vec2 v = Vec2::UnitY();
  double width = 0.0;
  double height = 0.0;
  double area() const { return width * height; }
};

/// Minimum-area enclosing rectangle by rotating calipers over the hull. The u
/// axis is the rectangle side closest to the local x axis, oriented with u.x >= 0,
/// and v completes a right-handed frame.
Rect2 min_area_rect(const std::vector<Vec2>& pts);

}  // namespace mavi
