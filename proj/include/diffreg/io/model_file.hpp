#pragma once

#include <string>

#include "diffreg/diffusion/params.hpp"
#include "diffreg/transformer/params.hpp"

namespace diffreg {

struct ModelDims {
  std::size_t patch_dim = 64;
  std::size_t point_dim = 16;
  int heads = 4;
  std::size_t head_dim = 32;
  std::size_t pos_dim = 32;
};

// Every seeded weight in the pipeline, reproducible from the master seed
// alone and serializable to the "PDNW" tensor container.
struct ModelParams {
  std::uint64_t seed = 0;
  std::uint64_t descriptor_seed = 0;
  DiffusionParams patch_diffusion;
  DiffusionParams point_diffusion;
  AttentionParams transformer;
  AttentionParams window_attention;
};

ModelParams seeded_model(const ModelDims& dims, std::uint64_t seed);

// Container format: magic "PDNW", u16 version, u32 tensor count, then
// length-prefixed named tensors (u16 name length, name, u8 rank, u32 dims,
// little-endian f32 payload). 64-bit seeds and f64 scalars are stored as
// four/sixteen 16-bit chunks (exact in f32).
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace diffreg
