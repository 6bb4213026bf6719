#pragma once

#include "diffreg/core/matrix.hpp"
#include "diffreg/transformer/params.hpp"

namespace diffreg {

// Multi-head feature-position self-attention: per head the logits are
// (F Wq)(F Wk)^T/sqrt(d_s) + (F Weq)(E Wek)^T/sqrt(d_e) on row-normalized
// inputs, row-softmaxed and applied to F Wv; heads concatenate into the
// output projection.
FeatureMatrix self_attention(const PairedState& state,
                             const AttentionParams& params);

// Residual + normalization + FFN around self_attention (the f_s_ate block).
FeatureMatrix self_attention_block(const PairedState& state,
                                   const AttentionParams& params);

// U-side embedding attending over V. Queries come from U's self-attended
// features (state_u.features) with positional logits from
// (E_U Wceq)(E_V Wcek)^T; keys/values from V's block output.
FeatureMatrix cross_attention(const PairedState& state_u,
                              const FeatureMatrix& attended_v,
                              const FeatureMatrix& positions_v,
                              const AttentionParams& params);

// Two-layer FFN with tanh: x W1 + b1 -> tanh -> W2 + b2.
FeatureMatrix ffn_forward(const FeatureMatrix& x, const std::vector<double>& w1,
                          const std::vector<double>& b1,
                          const std::vector<double>& w2,
                          const std::vector<double>& b2, std::size_t hidden,
                          std::size_t out_dim);

}  // namespace diffreg
