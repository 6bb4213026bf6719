#include "diffreg/transformer/params.hpp"

#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/core/rng.hpp"

namespace diffreg {
namespace {

HeadWeights seeded_head(std::size_t model_dim, std::size_t head_dim,
                        std::size_t pos_dim, std::uint64_t seed,
                        const std::string& stream) {
  HeadWeights h;
  h.wq = init_weights(seed, stream + ".wq", model_dim * head_dim, model_dim);
  h.wk = init_weights(seed, stream + ".wk", model_dim * head_dim, model_dim);
  h.wv = init_weights(seed, stream + ".wv", model_dim * head_dim, model_dim);
  h.weq = init_weights(seed, stream + ".weq", model_dim * pos_dim, model_dim);
  h.wek = init_weights(seed, stream + ".wek", model_dim * pos_dim, model_dim);
  return h;
}

}  // namespace

AttentionParams AttentionParams::seeded(std::size_t model_dim, int heads,
                                        std::size_t head_dim,
                                        std::size_t pos_dim,
                                        std::uint64_t seed,
                                        const std::string& stream) {
  AttentionParams p;
  p.heads = heads;
  p.model_dim = model_dim;
  p.head_dim = head_dim;
  p.pos_dim = pos_dim;
  p.ffn_dim = 2 * model_dim;
  p.seed = seed;

  for (int i = 0; i < heads; ++i) {
    p.self_heads.push_back(seeded_head(model_dim, head_dim, pos_dim, seed,
                                       stream + ".self" + std::to_string(i)));
    p.cross_heads.push_back(seeded_head(model_dim, head_dim, pos_dim, seed,
                                        stream + ".cross" +
                                            std::to_string(i)));
  }
  const std::size_t concat = static_cast<std::size_t>(heads) * head_dim;
  p.w_self_out =
      init_weights(seed, stream + ".ws", concat * model_dim, concat);
  p.w_cross_out =
      init_weights(seed, stream + ".wc", concat * model_dim, concat);

  p.ffn_w1 = init_weights(seed, stream + ".ffn_w1", model_dim * p.ffn_dim,
                          model_dim);
  p.ffn_b1 = init_weights(seed, stream + ".ffn_b1", p.ffn_dim, model_dim);
  p.ffn_w2 = init_weights(seed, stream + ".ffn_w2", p.ffn_dim * model_dim,
                          p.ffn_dim);
  p.ffn_b2 = init_weights(seed, stream + ".ffn_b2", model_dim, p.ffn_dim);

  p.comb_w1 = init_weights(seed, stream + ".comb_w1", model_dim * p.ffn_dim,
                           model_dim);
  p.comb_b1 = init_weights(seed, stream + ".comb_b1", p.ffn_dim, model_dim);
  p.comb_w2 = init_weights(seed, stream + ".comb_w2", p.ffn_dim * model_dim,
                           p.ffn_dim);
  p.comb_b2 = init_weights(seed, stream + ".comb_b2", model_dim, p.ffn_dim);

  p.fc_w1 = init_weights(seed, stream + ".fc_w1", model_dim * model_dim,
                         model_dim);
  p.fc_b1 = init_weights(seed, stream + ".fc_b1", model_dim, model_dim);
  p.fc_w2 = init_weights(seed, stream + ".fc_w2", model_dim * model_dim,
                         model_dim);
  p.fc_b2 = init_weights(seed, stream + ".fc_b2", model_dim, model_dim);
  return p;
}

void AttentionParams::validate() const {
  if (heads < 1 || model_dim == 0 || head_dim == 0 || pos_dim == 0)
    throw ConfigError("AttentionParams: invalid dimensions");
  if (self_heads.size() != static_cast<std::size_t>(heads) ||
      cross_heads.size() != static_cast<std::size_t>(heads))
    throw ShapeMismatch("AttentionParams: head count mismatch");
  const std::size_t concat = static_cast<std::size_t>(heads) * head_dim;
  auto check = [](const std::vector<double>& v, std::size_t want,
                  const char* what) {
    if (v.size() != want)
      throw ShapeMismatch(std::string("AttentionParams: bad shape for ") +
                          what);
    for (double x : v)
      if (!std::isfinite(x))
        throw ConfigError(std::string("AttentionParams: non-finite ") + what);
  };
  for (const auto* heads_vec : {&self_heads, &cross_heads})
    for (const HeadWeights& h : *heads_vec) {
      check(h.wq, model_dim * head_dim, "wq");
      check(h.wk, model_dim * head_dim, "wk");
      check(h.wv, model_dim * head_dim, "wv");
      check(h.weq, model_dim * pos_dim, "weq");
      check(h.wek, model_dim * pos_dim, "wek");
    }
  check(w_self_out, concat * model_dim, "w_self_out");
  check(w_cross_out, concat * model_dim, "w_cross_out");
  check(ffn_w1, model_dim * ffn_dim, "ffn_w1");
  check(ffn_b1, ffn_dim, "ffn_b1");
  check(ffn_w2, ffn_dim * model_dim, "ffn_w2");
  check(ffn_b2, model_dim, "ffn_b2");
  check(comb_w1, model_dim * ffn_dim, "comb_w1");
  check(comb_b1, ffn_dim, "comb_b1");
  check(comb_w2, ffn_dim * model_dim, "comb_w2");
  check(comb_b2, model_dim, "comb_b2");
  check(fc_w1, model_dim * model_dim, "fc_w1");
  check(fc_b1, model_dim, "fc_b1");
  check(fc_w2, model_dim * model_dim, "fc_w2");
  check(fc_b2, model_dim, "fc_b2");
}

}  // namespace diffreg
