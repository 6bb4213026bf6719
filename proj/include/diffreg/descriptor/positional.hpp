#pragma once

#include "diffreg/core/geometry.hpp"
#include "diffreg/core/matrix.hpp"

namespace diffreg {

// Sinusoidal coordinate encoding: dim/6 dyadic frequency octaves per axis,
// sin and cos per octave, everything scaled by alpha. Trailing dim % 6
// entries are zero. base_frequency is in cycles per meter for octave 0.
FeatureMatrix encode_positions(const PointCloud& cloud, std::size_t dim,
                               double alpha, double base_frequency = 0.01);

// Highest frequency used at this dim (cycles per meter); the Lipschitz bound
// per entry is alpha * 2*pi * max_encoding_frequency * |dx|.
double max_encoding_frequency(std::size_t dim, double base_frequency = 0.01);

}  // namespace diffreg
