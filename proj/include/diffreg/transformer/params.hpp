#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace diffreg {

struct HeadWeights {
  std::vector<double> wq, wk, wv;  // model_dim x head_dim
  std::vector<double> weq, wek;    // model_dim x pos_dim
};

// Weights for the feature-position attention stack: per-head self and cross
// projections, output projections, the block FFN, the self/cross merge FFN,
// and the two-layer position path.
struct AttentionParams {
  int heads = 4;
  std::size_t model_dim = 64;
  std::size_t head_dim = 32;  // d^s = d^c
  std::size_t pos_dim = 32;   // d^e
  std::size_t ffn_dim = 128;
  std::uint64_t seed = 0;

  std::vector<HeadWeights> self_heads;
  std::vector<HeadWeights> cross_heads;
  std::vector<double> w_self_out;   // (heads*head_dim) x model_dim
  std::vector<double> w_cross_out;  // (heads*head_dim) x model_dim

  std::vector<double> ffn_w1, ffn_b1, ffn_w2, ffn_b2;      // block FFN
  std::vector<double> comb_w1, comb_b1, comb_w2, comb_b2;  // f_sc merge FFN
  std::vector<double> fc_w1, fc_b1, fc_w2, fc_b2;          // f_fc, d x d

  static AttentionParams seeded(std::size_t model_dim, int heads,
                                std::size_t head_dim, std::size_t pos_dim,
                                std::uint64_t seed, const std::string& stream);
  void validate() const;
};

struct OdeConfig {
  double t_final = 2.0;
  double rtol = 0.01;
  double atol = 0.01;
};

}  // namespace diffreg
