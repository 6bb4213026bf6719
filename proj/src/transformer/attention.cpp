#include "diffreg/transformer/attention.hpp"

#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {
namespace {

void add_bias_rows(FeatureMatrix& x, const std::vector<double>& b) {
  for (std::size_t i = 0; i < x.rows; ++i)
    simd::axpy(1.0, b.data(), x.row(i), x.dim);
}

// Shared multi-head core: logits = (Qf Wq)(Kf Wk)^T/sqrt(dh)
//                                + (Qp Weq)(Kp Wek)^T/sqrt(de), softmaxed,
// applied to Kf Wv, concatenated across heads, projected by w_out.
FeatureMatrix multihead(const FeatureMatrix& qf, const FeatureMatrix& qp,
                        const FeatureMatrix& kf, const FeatureMatrix& kp,
                        const std::vector<HeadWeights>& heads,
                        const std::vector<double>& w_out,
                        const AttentionParams& params) {
  const std::size_t n = qf.rows, m = kf.rows;
  const std::size_t dh = params.head_dim, de = params.pos_dim;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  const double inv_sqrt_de = 1.0 / std::sqrt(static_cast<double>(de));

  FeatureMatrix concat(n, static_cast<std::size_t>(params.heads) * dh);
  FeatureMatrix logits(n, m);
  for (int h = 0; h < params.heads; ++h) {
    const HeadWeights& w = heads[static_cast<std::size_t>(h)];
    const FeatureMatrix q = matmul(qf, w.wq, dh);
    const FeatureMatrix k = matmul(kf, w.wk, dh);
    const FeatureMatrix v = matmul(kf, w.wv, dh);
    const FeatureMatrix qe = matmul(qp, w.weq, de);
    const FeatureMatrix ke = matmul(kp, w.wek, de);

    simd::gemm_nt(q.data.data(), k.data.data(), logits.data.data(), n, dh, m);
    simd::scale(logits.data.data(), inv_sqrt_dh, logits.data.size());
    FeatureMatrix pos_logits(n, m);
    simd::gemm_nt(qe.data.data(), ke.data.data(), pos_logits.data.data(), n,
                  de, m);
    simd::axpy(inv_sqrt_de, pos_logits.data.data(), logits.data.data(),
               logits.data.size());
    softmax_rows(logits);

    FeatureMatrix head_out(n, dh);
    simd::gemm_nn(logits.data.data(), v.data.data(), head_out.data.data(), n,
                  m, dh);
    for (std::size_t i = 0; i < n; ++i)
      std::copy(head_out.row(i), head_out.row(i) + dh,
                concat.row(i) + static_cast<std::size_t>(h) * dh);
  }
  return matmul(concat, w_out, params.model_dim);
}

}  // namespace

FeatureMatrix ffn_forward(const FeatureMatrix& x, const std::vector<double>& w1,
                          const std::vector<double>& b1,
                          const std::vector<double>& w2,
                          const std::vector<double>& b2, std::size_t hidden,
                          std::size_t out_dim) {
  FeatureMatrix h = matmul(x, w1, hidden);
  add_bias_rows(h, b1);
  for (double& v : h.data) v = std::tanh(v);
  FeatureMatrix out = matmul(h, w2, out_dim);
  add_bias_rows(out, b2);
  return out;
}

FeatureMatrix self_attention(const PairedState& state,
                             const AttentionParams& params) {
  state.validate();
  params.validate();
  if (state.dim() != params.model_dim)
    throw ShapeMismatch("self_attention: state dim != model dim");
  const FeatureMatrix f = row_normalize(state.features);
  const FeatureMatrix e = row_normalize(state.positions);
  return multihead(f, f, f, e, params.self_heads, params.w_self_out, params);
}

FeatureMatrix self_attention_block(const PairedState& state,
                                   const AttentionParams& params) {
  const FeatureMatrix att = self_attention(state, params);
  const FeatureMatrix x = row_normalize(add(state.features, att));
  const FeatureMatrix f = ffn_forward(x, params.ffn_w1, params.ffn_b1,
                                      params.ffn_w2, params.ffn_b2,
                                      params.ffn_dim, params.model_dim);
  return row_normalize(add(x, f));
}

FeatureMatrix cross_attention(const PairedState& state_u,
                              const FeatureMatrix& attended_v,
                              const FeatureMatrix& positions_v,
                              const AttentionParams& params) {
  state_u.validate();
  params.validate();
  if (state_u.dim() != params.model_dim ||
      attended_v.dim != params.model_dim ||
      positions_v.dim != params.model_dim)
    throw ShapeMismatch("cross_attention: dim mismatch");
  if (attended_v.rows != positions_v.rows)
    throw ShapeMismatch("cross_attention: V-side row mismatch");

  const FeatureMatrix q = row_normalize(state_u.features);
  const FeatureMatrix eu = row_normalize(state_u.positions);
  const FeatureMatrix kv = row_normalize(attended_v);
  const FeatureMatrix ev = row_normalize(positions_v);
  return multihead(q, eu, kv, ev, params.cross_heads, params.w_cross_out,
                   params);
}

}  // namespace diffreg
