#include "mavi/geometry/ply_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mavi {

void write_ply(std::ostream& os, const PointCloud& cloud) {
  cloud.validate();
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << cloud.size() << '\n';
  os << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_normals()) os << "property float nx\nproperty float ny\nproperty float nz\n";
  if (cloud.has_labels()) os << "property int label\n";
  os << "end_header\n";
  char buf[160];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    int n = std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f", p.x(), p.y(), p.z());
    os.write(buf, n);
    if (cloud.has_normals()) {
      const Vec3& q = cloud.normals[i];
      n = std::snprintf(buf, sizeof(buf), " %.6f %.6f %.6f", q.x(), q.y(), q.z());
      os.write(buf, n);
    }
    if (cloud.has_labels()) os << ' ' << cloud.labels[i];
    os << '\n';
  }
}

void write_ply(const std::string& path, const PointCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_ply(os, cloud);
}

PointCloud read_ply(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line.rfind("ply", 0) != 0) throw Error("not a PLY stream");
  std::size_t count = 0;
  std::vector<std::string> props;
  bool in_vertex = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw Error("only ASCII PLY is supported");
    } else if (word == "element") {
      std::string name;
      ls >> name;
      in_vertex = name == "vertex";
      if (in_vertex) ls >> count;
    } else if (word == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      props.push_back(name);
    } else if (word == "end_header") {
      break;
    }
  }
  auto find = [&](const std::string& n) {
    for (std::size_t i = 0; i < props.size(); ++i)
      if (props[i] == n) return static_cast<int>(i);
    return -1;
  };
  const int ix = find("x"), iy = find("y"), iz = find("z");
  if (ix < 0 || iy < 0 || iz < 0) throw Error("PLY vertex lacks x/y/z");
  const int inx = find("nx"), iny = find("ny"), inz = find("nz");
  const bool normals = inx >= 0 && iny >= 0 && inz >= 0;
  const int ilabel = find("label");

  PointCloud cloud;
  cloud.points.reserve(count);
  std::vector<double> vals(props.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw Error("PLY ended before all vertices were read");
    std::istringstream ls(line);
    for (auto& v : vals) {
      if (!(ls >> v)) throw Error("malformed PLY vertex line");
    }
    cloud.points.emplace_back(vals[ix], vals[iy], vals[iz]);
    if (normals) {
      Vec3 n(vals[inx], vals[iny], vals[inz]);
      cloud.normals.push_back(n.normalized());
    }
    if (ilabel >= 0) cloud.labels.push_back(static_cast<int>(vals[ilabel]));
  }
  return cloud;
}

PointCloud read_ply(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_ply(is);
}

}  // namespace mavi
