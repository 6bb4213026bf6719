#pragma once

#include <utility>

#include "diffreg/core/matrix.hpp"
#include "diffreg/ode/integrator.hpp"
#include "diffreg/transformer/params.hpp"

namespace diffreg {

struct TransformerOdeResult {
  PairedState u;
  PairedState v;
  OdeStats stats;
};

// Integrates d[F,E]/dt = [f_sc(F(t)), f_fc(E(t))] for both sides jointly
// over [0, t_final], so cross-attention always reads time-consistent states.
// f_sc sums self- and cross-attention outputs and applies one residual FFN;
// f_fc is the two-layer position path.
TransformerOdeResult transformer_ode(const PairedState& state_u,
                                     const PairedState& state_v,
                                     const AttentionParams& params,
                                     const OdeConfig& ode);

}  // namespace diffreg
