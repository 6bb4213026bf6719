#include "diffreg/diffusion/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "diffreg/core/errors.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {
namespace {

constexpr std::size_t kNodeBlock = 128;

struct Workspace {
  std::vector<double> edge_in, edge_out, hidden;
};

// One EdgeConv layer: per edge a linear map of the concatenated
// [own row, neighbor difference, (optional extra row)], max-aggregated per
// node. Inputs/outputs are flat row-major n x dim buffers.
void edgeconv_layer(const double* z, std::size_t n, std::size_t in_dim,
                    const double* extra, std::size_t extra_dim,
                    const KnnGraph& graph, const std::vector<double>& w,
                    const std::vector<double>& b, std::size_t out_dim,
                    Workspace& ws, double* out) {
  const std::size_t k = static_cast<std::size_t>(graph.k);
  const std::size_t edge_dim = 2 * in_dim + extra_dim;
  if (k == 0) {
    std::memset(out, 0, n * out_dim * sizeof(double));
    return;
  }
  ws.edge_in.resize(kNodeBlock * k * edge_dim);
  ws.edge_out.resize(kNodeBlock * k * out_dim);

  for (std::size_t b0 = 0; b0 < n; b0 += kNodeBlock) {
    const std::size_t bn = std::min(kNodeBlock, n - b0);
    double* e = ws.edge_in.data();
    for (std::size_t bi = 0; bi < bn; ++bi) {
      const std::size_t i = b0 + bi;
      const double* zi = z + i * in_dim;
      for (int j : graph.neighbors_of(i)) {
        const double* zj = z + static_cast<std::size_t>(j) * in_dim;
        std::memcpy(e, zi, in_dim * sizeof(double));
        for (std::size_t c = 0; c < in_dim; ++c) e[in_dim + c] = zj[c] - zi[c];
        if (extra_dim)
          std::memcpy(e + 2 * in_dim, extra + i * extra_dim,
                      extra_dim * sizeof(double));
        e += edge_dim;
      }
    }
    simd::gemm_nn(ws.edge_in.data(), w.data(), ws.edge_out.data(), bn * k,
                  edge_dim, out_dim);
    for (std::size_t bi = 0; bi < bn; ++bi) {
      double* o = out + (b0 + bi) * out_dim;
      const double* rows = ws.edge_out.data() + bi * k * out_dim;
      std::memcpy(o, rows, out_dim * sizeof(double));
      for (std::size_t m = 1; m < k; ++m)
        simd::elementwise_max(o, rows + m * out_dim, out_dim);
      simd::axpy(1.0, b.data(), o, out_dim);
    }
  }
}

void edgeconv_forward(const double* z, std::size_t n,
                      const KnnGraph& graph, const DiffusionParams& p,
                      Workspace& ws, double* out) {
  const std::size_t s = p.state_dim;
  ws.hidden.resize(n * s);
  edgeconv_layer(z, n, s, nullptr, 0, graph, p.w1, p.b1, s, ws, ws.hidden.data());
  for (double& v : ws.hidden) v = std::tanh(v);
  edgeconv_layer(ws.hidden.data(), n, s, z, s, graph, p.w2, p.b2, s, ws, out);
}

std::vector<double> flatten(const PairedState& st) {
  const std::size_t n = st.rows(), d = st.dim();
  std::vector<double> y(n * 2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(y.data() + i * 2 * d, st.features.row(i), d * sizeof(double));
    std::memcpy(y.data() + i * 2 * d + d, st.positions.row(i),
                d * sizeof(double));
  }
  return y;
}

PairedState unflatten(const std::vector<double>& y, std::size_t n,
                      std::size_t d) {
  PairedState st;
  st.features = FeatureMatrix(n, d);
  st.positions = FeatureMatrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(st.features.row(i), y.data() + i * 2 * d, d * sizeof(double));
    std::memcpy(st.positions.row(i), y.data() + i * 2 * d + d,
                d * sizeof(double));
  }
  return st;
}

FeatureMatrix positions_block(const std::vector<double>& y, std::size_t n,
                              std::size_t d) {
  FeatureMatrix pos(n, d);
  for (std::size_t i = 0; i < n; ++i)
    std::memcpy(pos.row(i), y.data() + i * 2 * d + d, d * sizeof(double));
  return pos;
}

}  // namespace

PairedState diffusion_rhs(const PairedState& state, const KnnGraph& graph,
                          const DiffusionParams& params) {
  state.validate();
  params.validate();
  if (2 * state.dim() != params.state_dim)
    throw ShapeMismatch("diffusion_rhs: state dim does not match weights");
  if (graph.n != state.rows())
    throw ShapeMismatch("diffusion_rhs: graph size does not match state");

  const std::vector<double> y = flatten(state);
  std::vector<double> dy(y.size());
  Workspace ws;
  edgeconv_forward(y.data(), state.rows(), graph, params, ws, dy.data());
  return unflatten(dy, state.rows(), state.dim());
}

DiffusionResult diffuse(const PairedState& state,
                        const DiffusionParams& params) {
  state.validate();
  params.validate();
  if (2 * state.dim() != params.state_dim)
    throw ShapeMismatch("diffuse: state dim does not match weights");

  DiffusionResult result;
  const std::size_t n = state.rows(), d = state.dim();
  if (n < 2 || params.t_final <= 0.0) {
    result.state = state;  // no neighbors or no time span: identity
    return result;
  }

  std::vector<double> y = flatten(state);
  KnnGraph graph = build_knn_graph(positions_block(y, n, d), params.k);
  Workspace ws;

  const OdeRhs rhs = [&](double, const std::vector<double>& yy,
                         std::vector<double>& dy) {
    dy.resize(yy.size());
    edgeconv_forward(yy.data(), n, graph, params, ws, dy.data());
  };
  const OdeStepCallback rewire = [&](double, const std::vector<double>& yy) {
    graph = build_knn_graph(positions_block(yy, n, d), params.k);
    ++result.graph_rebuilds;
  };

  OdeOptions opts;
  opts.t_final = params.t_final;
  opts.rtol = params.rtol;
  opts.atol = params.atol;
  result.stats = integrate_adaptive(rhs, y, opts, rewire);
  result.state = unflatten(y, n, d);
  return result;
}

PairedState explicit_step(const PairedState& state, const KnnGraph& graph,
                          const std::vector<double>& edge_weights,
                          double tau) {
  state.validate();
  const std::size_t n = state.rows(), d = state.dim();
  const std::size_t k = static_cast<std::size_t>(graph.k);
  if (graph.n != n)
    throw ShapeMismatch("explicit_step: graph size does not match state");
  if (edge_weights.size() != n * k)
    throw ShapeMismatch("explicit_step: edge weight count mismatch");

  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      const double a = edge_weights[i * k + m];
      if (a < 0.0)
        throw StabilityViolation("explicit_step: negative attention weight");
      row_sum += a;
    }
    if (tau * row_sum > 1.0 + 1e-12)
      throw StabilityViolation(
          "explicit_step: tau * attention row sum exceeds 1");
  }

  PairedState out = state;
  auto update = [&](const FeatureMatrix& src, FeatureMatrix& dst) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto nbrs = graph.neighbors_of(i);
      double* o = dst.row(i);
      const double* zi = src.row(i);
      for (std::size_t m = 0; m < k; ++m) {
        const double a = tau * edge_weights[i * k + m];
        if (a == 0.0) continue;
        const double* zj = src.row(static_cast<std::size_t>(nbrs[m]));
        for (std::size_t c = 0; c < d; ++c) o[c] += a * (zj[c] - zi[c]);
      }
    }
  };
  update(state.features, out.features);
  update(state.positions, out.positions);
  return out;
}

PairedState explicit_step(const PairedState& state, const KnnGraph& graph,
                          const EdgeAttention& attention, double tau) {
  state.validate();
  const std::size_t n = state.rows(), d = state.dim();
  const std::size_t k = static_cast<std::size_t>(graph.k);
  std::vector<double> weights(n * k);
  std::vector<double> zi(2 * d), zj(2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(zi.data(), state.features.row(i), d * sizeof(double));
    std::memcpy(zi.data() + d, state.positions.row(i), d * sizeof(double));
    const auto nbrs = graph.neighbors_of(i);
    for (std::size_t m = 0; m < k; ++m) {
      const auto j = static_cast<std::size_t>(nbrs[m]);
      std::memcpy(zj.data(), state.features.row(j), d * sizeof(double));
      std::memcpy(zj.data() + d, state.positions.row(j), d * sizeof(double));
      weights[i * k + m] = attention(zi, zj);
    }
  }
  return explicit_step(state, graph, weights, tau);
}

std::vector<double> softmax_edge_attention(const PairedState& state,
                                           const KnnGraph& graph) {
  state.validate();
  const std::size_t n = state.rows(), d = state.dim();
  const std::size_t k = static_cast<std::size_t>(graph.k);
  const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(2 * d));

  std::vector<double> weights(n * k);
  std::vector<double> logits(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nbrs = graph.neighbors_of(i);
    for (std::size_t m = 0; m < k; ++m) {
      const auto j = static_cast<std::size_t>(nbrs[m]);
      const double d2 =
          simd::squared_distance(state.features.row(i), state.features.row(j),
                                 d) +
          simd::squared_distance(state.positions.row(i),
                                 state.positions.row(j), d);
      logits[m] = -d2 * inv_sqrt_dim;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      weights[i * k + m] = std::exp(logits[m] - mx);
      sum += weights[i * k + m];
    }
    for (std::size_t m = 0; m < k; ++m) weights[i * k + m] /= sum;
  }
  return weights;
}

}  // namespace diffreg
