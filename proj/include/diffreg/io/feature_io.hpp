#pragma once

#include <string>

#include "diffreg/core/matrix.hpp"

namespace diffreg {

// Flat binary feature file: magic "FMAT", u32 rows, u32 dim (little-endian),
// then row-major float32 data.
void write_feature_matrix(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_feature_matrix(const std::string& path);

}  // namespace diffreg
