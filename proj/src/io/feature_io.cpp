#include "diffreg/io/feature_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "diffreg/core/errors.hpp"

namespace diffreg {
namespace {

constexpr char kMagic[4] = {'F', 'M', 'A', 'T'};

}  // namespace

void write_feature_matrix(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("write_feature_matrix: cannot open " + path);
  out.write(kMagic, 4);
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows);
  const std::uint32_t dim = static_cast<std::uint32_t>(m.dim);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  std::vector<float> payload(m.data.size());
  for (std::size_t i = 0; i < m.data.size(); ++i)
    payload[i] = static_cast<float>(m.data[i]);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * 4));
  if (!out) throw IoFailure("write_feature_matrix: write failed on " + path);
}

FeatureMatrix read_feature_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("read_feature_matrix: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw MalformedFile("read_feature_matrix: bad magic in " + path);
  std::uint32_t rows = 0, dim = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  if (!in) throw MalformedFile("read_feature_matrix: bad header in " + path);

  FeatureMatrix m(rows, dim);
  std::vector<float> payload(m.data.size());
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * 4));
  if (!in) throw MalformedFile("read_feature_matrix: truncated " + path);
  for (std::size_t i = 0; i < payload.size(); ++i)
    m.data[i] = static_cast<double>(payload[i]);
  return m;
}

}  // namespace diffreg
