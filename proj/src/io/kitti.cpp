#include "diffreg/io/kitti.hpp"

#include <cstdint>
#include <fstream>
#include <vector>

#include "diffreg/core/errors.hpp"

namespace diffreg {

PointCloud read_kitti_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoFailure("read_kitti_bin: cannot open " + path);
  const std::streamoff size = in.tellg();
  if (size == 0) throw EmptyCloud("read_kitti_bin: empty file " + path);
  if (size % 16 != 0)
    throw MalformedFile("read_kitti_bin: size not a multiple of 16: " + path);

  in.seekg(0);
  const std::size_t count = static_cast<std::size_t>(size) / 16;
  std::vector<float> raw(count * 4);
  in.read(reinterpret_cast<char*>(raw.data()), size);
  if (!in) throw IoFailure("read_kitti_bin: short read on " + path);

  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.intensity.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    cloud.points.push_back({static_cast<double>(raw[i * 4]),
                            static_cast<double>(raw[i * 4 + 1]),
                            static_cast<double>(raw[i * 4 + 2])});
    cloud.intensity.push_back(raw[i * 4 + 3]);
  }
  return cloud;
}

void write_kitti_bin(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("write_kitti_bin: cannot open " + path);
  std::vector<float> raw(cloud.size() * 4);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    raw[i * 4] = static_cast<float>(cloud.points[i].x);
    raw[i * 4 + 1] = static_cast<float>(cloud.points[i].y);
    raw[i * 4 + 2] = static_cast<float>(cloud.points[i].z);
    raw[i * 4 + 3] = cloud.has_intensity() ? cloud.intensity[i] : 0.0f;
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!out) throw IoFailure("write_kitti_bin: short write on " + path);
}

}  // namespace diffreg
