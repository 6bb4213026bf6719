#include "diffreg/io/ply.hpp"

#include <fstream>

#include "diffreg/core/errors.hpp"

namespace diffreg {

void write_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("write_ply: cannot open " + path);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "end_header\n";
  out.precision(8);
  for (const Point3& p : cloud.points)
    out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  if (!out) throw IoFailure("write_ply: write failed on " + path);
}

}  // namespace diffreg
