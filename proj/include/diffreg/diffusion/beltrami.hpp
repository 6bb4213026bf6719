#pragma once

#include <functional>
#include <span>

#include "diffreg/core/matrix.hpp"
#include "diffreg/diffusion/knn_graph.hpp"
#include "diffreg/diffusion/params.hpp"
#include "diffreg/ode/integrator.hpp"

namespace diffreg {

// d[H, I]/dt for the EdgeConv stack described in DiffusionParams. Nodes with
// no neighbors (single-node graphs) get a zero derivative.
PairedState diffusion_rhs(const PairedState& state, const KnnGraph& graph,
                          const DiffusionParams& params);

struct DiffusionResult {
  PairedState state;  // (F, E) = (H(T_f), I(T_f))
  OdeStats stats;
  int graph_rebuilds = 0;
};

// Integrates diffusion_rhs over [0, t_final] with the adaptive solver; the
// kNN graph is rebuilt from the positional block I(t) after every accepted
// step (positional rewiring).
DiffusionResult diffuse(const PairedState& state,
                        const DiffusionParams& params);

// Nonnegative edge weight for (z_i, z_j).
using EdgeAttention =
    std::function<double(std::span<const double>, std::span<const double>)>;

// Forward-difference step z_i += tau * sum_j a_ij (z_j - z_i), i.e. Z <- QZ
// with q_ii = 1 - tau*sum_j a_ij and q_ij = tau*a_ij. Requires a_ij >= 0 and
// tau * sum_j a_ij <= 1 per node (throws StabilityViolation otherwise).
PairedState explicit_step(const PairedState& state, const KnnGraph& graph,
                          const EdgeAttention& attention, double tau);
PairedState explicit_step(const PairedState& state, const KnnGraph& graph,
                          const std::vector<double>& edge_weights,
                          double tau);

// Per-neighbor softmax of -|z_i - z_j|^2 / sqrt(dim(z)); rows sum to 1, so
// any tau <= 1 satisfies the explicit-step precondition.
std::vector<double> softmax_edge_attention(const PairedState& state,
                                           const KnnGraph& graph);

}  // namespace diffreg
