#include "diffreg/transformer/ode.hpp"

#include <cstring>

#include "diffreg/core/errors.hpp"
#include "diffreg/transformer/attention.hpp"

namespace diffreg {
namespace {

struct Layout {
  std::size_t nu = 0, nv = 0, d = 0;

  std::size_t total() const { return 2 * (nu + nv) * d; }
  std::size_t fu() const { return 0; }
  std::size_t eu() const { return nu * d; }
  std::size_t fv() const { return 2 * nu * d; }
  std::size_t ev() const { return 2 * nu * d + nv * d; }
};

FeatureMatrix block(const std::vector<double>& y, std::size_t offset,
                    std::size_t rows, std::size_t d) {
  FeatureMatrix m(rows, d);
  std::memcpy(m.data.data(), y.data() + offset, rows * d * sizeof(double));
  return m;
}

void store(std::vector<double>& y, std::size_t offset,
           const FeatureMatrix& m) {
  std::memcpy(y.data() + offset, m.data.data(),
              m.data.size() * sizeof(double));
}

// dF for one side: f_sc = (self + cross) with one residual FFN on top.
FeatureMatrix feature_derivative(const PairedState& self_state,
                                 const PairedState& other_state,
                                 const AttentionParams& params) {
  const FeatureMatrix self_att = self_attention(self_state, params);
  const FeatureMatrix other_block = self_attention_block(other_state, params);
  const PairedState q{self_att, self_state.positions};
  const FeatureMatrix cross =
      cross_attention(q, other_block, other_state.positions, params);
  const FeatureMatrix merged = add(self_att, cross);
  const FeatureMatrix f =
      ffn_forward(merged, params.comb_w1, params.comb_b1, params.comb_w2,
                  params.comb_b2, params.ffn_dim, params.model_dim);
  return add(merged, f);
}

FeatureMatrix position_derivative(const FeatureMatrix& e,
                                  const AttentionParams& params) {
  return ffn_forward(e, params.fc_w1, params.fc_b1, params.fc_w2, params.fc_b2,
                     params.model_dim, params.model_dim);
}

}  // namespace

TransformerOdeResult transformer_ode(const PairedState& state_u,
                                     const PairedState& state_v,
                                     const AttentionParams& params,
                                     const OdeConfig& ode) {
  state_u.validate();
  state_v.validate();
  params.validate();
  if (state_u.dim() != params.model_dim || state_v.dim() != params.model_dim)
    throw ShapeMismatch("transformer_ode: state dim != model dim");

  const Layout lay{state_u.rows(), state_v.rows(), params.model_dim};
  std::vector<double> y(lay.total());
  store(y, lay.fu(), state_u.features);
  store(y, lay.eu(), state_u.positions);
  store(y, lay.fv(), state_v.features);
  store(y, lay.ev(), state_v.positions);

  const OdeRhs rhs = [&](double, const std::vector<double>& yy,
                         std::vector<double>& dy) {
    dy.resize(yy.size());
    const PairedState u{block(yy, lay.fu(), lay.nu, lay.d),
                        block(yy, lay.eu(), lay.nu, lay.d)};
    const PairedState v{block(yy, lay.fv(), lay.nv, lay.d),
                        block(yy, lay.ev(), lay.nv, lay.d)};
    store(dy, lay.fu(), feature_derivative(u, v, params));
    store(dy, lay.eu(), position_derivative(u.positions, params));
    store(dy, lay.fv(), feature_derivative(v, u, params));
    store(dy, lay.ev(), position_derivative(v.positions, params));
  };

  OdeOptions opts;
  opts.t_final = ode.t_final;
  opts.rtol = ode.rtol;
  opts.atol = ode.atol;

  TransformerOdeResult result;
  result.stats = integrate_adaptive(rhs, y, opts);
  result.u = PairedState{block(y, lay.fu(), lay.nu, lay.d),
                         block(y, lay.eu(), lay.nu, lay.d)};
  result.v = PairedState{block(y, lay.fv(), lay.nv, lay.d),
                         block(y, lay.ev(), lay.nv, lay.d)};
  return result;
}

}  // namespace diffreg
