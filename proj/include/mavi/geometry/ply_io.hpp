#pragma once

#include <iosfwd>
#include <string>

#include "mavi/geometry/point_cloud.hpp"

namespace mavi {

/// ASCII PLY: "x y z [nx ny nz] [label]" per vertex.
void write_ply(std::ostream& os, const PointCloud& cloud);
void write_ply(const std::string& path, const PointCloud& cloud);

/// Reads x/y/z, optional nx/ny/nz and an optional integer "label" property.
/// Other vertex properties are skipped. Throws Error on malformed input.
PointCloud read_ply(std::istream& is);
PointCloud read_ply(const std::string& path);

}  // namespace mavi
