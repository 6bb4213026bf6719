#include "diffreg/io/model_file.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "diffreg/core/errors.hpp"

namespace diffreg {
namespace {

constexpr char kMagic[4] = {'P', 'D', 'N', 'W'};
constexpr std::uint16_t kVersion = 1;

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t count() const {
    std::size_t n = 1;
    for (std::uint32_t d : dims) n *= d;
    return n;
  }
};

using TensorMap = std::map<std::string, Tensor>;

Tensor from_doubles(const std::vector<double>& v,
                    std::vector<std::uint32_t> dims) {
  Tensor t;
  t.dims = std::move(dims);
  t.data.reserve(v.size());
  for (double x : v) t.data.push_back(static_cast<float>(x));
  return t;
}

std::vector<double> to_doubles(const Tensor& t) {
  std::vector<double> v;
  v.reserve(t.data.size());
  for (float x : t.data) v.push_back(static_cast<double>(x));
  return v;
}

// 64-bit values ride in four 16-bit chunks, each exact in f32.
Tensor from_u64(std::uint64_t value) {
  Tensor t;
  t.dims = {4};
  for (int c = 0; c < 4; ++c)
    t.data.push_back(
        static_cast<float>((value >> (16 * c)) & 0xffffull));
  return t;
}

std::uint64_t to_u64(const Tensor& t) {
  if (t.data.size() != 4) throw MalformedFile("model file: bad u64 tensor");
  std::uint64_t v = 0;
  for (int c = 0; c < 4; ++c)
    v |= static_cast<std::uint64_t>(t.data[static_cast<std::size_t>(c)])
         << (16 * c);
  return v;
}

Tensor from_f64s(const std::vector<double>& values) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(values.size() * 4)};
  for (double v : values) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int c = 0; c < 4; ++c)
      t.data.push_back(static_cast<float>((bits >> (16 * c)) & 0xffffull));
  }
  return t;
}

std::vector<double> to_f64s(const Tensor& t) {
  if (t.data.size() % 4 != 0)
    throw MalformedFile("model file: bad f64 tensor");
  std::vector<double> out;
  for (std::size_t i = 0; i < t.data.size(); i += 4) {
    std::uint64_t bits = 0;
    for (int c = 0; c < 4; ++c)
      bits |= static_cast<std::uint64_t>(t.data[i + static_cast<std::size_t>(c)])
              << (16 * c);
    out.push_back(std::bit_cast<double>(bits));
  }
  return out;
}

void pack_diffusion(TensorMap& m, const std::string& p,
                    const DiffusionParams& d) {
  const std::uint32_t s = static_cast<std::uint32_t>(d.state_dim);
  m[p + ".meta_int"] = from_doubles(
      {static_cast<double>(d.k), static_cast<double>(d.state_dim)}, {2});
  m[p + ".meta_real"] = from_f64s({d.t_final, d.rtol, d.atol, d.tau});
  m[p + ".seed"] = from_u64(d.seed);
  m[p + ".w1"] = from_doubles(d.w1, {2 * s, s});
  m[p + ".b1"] = from_doubles(d.b1, {s});
  m[p + ".w2"] = from_doubles(d.w2, {3 * s, s});
  m[p + ".b2"] = from_doubles(d.b2, {s});
}

const Tensor& need(const TensorMap& m, const std::string& name) {
  const auto it = m.find(name);
  if (it == m.end())
    throw MalformedFile("model file: missing tensor " + name);
  return it->second;
}

DiffusionParams unpack_diffusion(const TensorMap& m, const std::string& p) {
  DiffusionParams d;
  const auto meta_int = to_doubles(need(m, p + ".meta_int"));
  const auto meta_real = to_f64s(need(m, p + ".meta_real"));
  if (meta_int.size() != 2 || meta_real.size() != 4)
    throw MalformedFile("model file: bad diffusion meta for " + p);
  d.k = static_cast<int>(meta_int[0]);
  d.state_dim = static_cast<std::size_t>(meta_int[1]);
  d.t_final = meta_real[0];
  d.rtol = meta_real[1];
  d.atol = meta_real[2];
  d.tau = meta_real[3];
  d.seed = to_u64(need(m, p + ".seed"));
  d.w1 = to_doubles(need(m, p + ".w1"));
  d.b1 = to_doubles(need(m, p + ".b1"));
  d.w2 = to_doubles(need(m, p + ".w2"));
  d.b2 = to_doubles(need(m, p + ".b2"));
  d.validate();
  return d;
}

void pack_attention(TensorMap& m, const std::string& p,
                    const AttentionParams& a) {
  const std::uint32_t d = static_cast<std::uint32_t>(a.model_dim);
  const std::uint32_t dh = static_cast<std::uint32_t>(a.head_dim);
  const std::uint32_t de = static_cast<std::uint32_t>(a.pos_dim);
  const std::uint32_t df = static_cast<std::uint32_t>(a.ffn_dim);
  const std::uint32_t concat = static_cast<std::uint32_t>(a.heads) * dh;
  m[p + ".meta"] = from_doubles(
      {static_cast<double>(a.heads), static_cast<double>(a.model_dim),
       static_cast<double>(a.head_dim), static_cast<double>(a.pos_dim),
       static_cast<double>(a.ffn_dim)},
      {5});
  m[p + ".seed"] = from_u64(a.seed);
  for (int h = 0; h < a.heads; ++h) {
    const auto& sh = a.self_heads[static_cast<std::size_t>(h)];
    const auto& ch = a.cross_heads[static_cast<std::size_t>(h)];
    const std::string sp = p + ".self" + std::to_string(h);
    const std::string cp = p + ".cross" + std::to_string(h);
    m[sp + ".wq"] = from_doubles(sh.wq, {d, dh});
    m[sp + ".wk"] = from_doubles(sh.wk, {d, dh});
    m[sp + ".wv"] = from_doubles(sh.wv, {d, dh});
    m[sp + ".weq"] = from_doubles(sh.weq, {d, de});
    m[sp + ".wek"] = from_doubles(sh.wek, {d, de});
    m[cp + ".wq"] = from_doubles(ch.wq, {d, dh});
    m[cp + ".wk"] = from_doubles(ch.wk, {d, dh});
    m[cp + ".wv"] = from_doubles(ch.wv, {d, dh});
    m[cp + ".weq"] = from_doubles(ch.weq, {d, de});
    m[cp + ".wek"] = from_doubles(ch.wek, {d, de});
  }
  m[p + ".ws"] = from_doubles(a.w_self_out, {concat, d});
  m[p + ".wc"] = from_doubles(a.w_cross_out, {concat, d});
  m[p + ".ffn_w1"] = from_doubles(a.ffn_w1, {d, df});
  m[p + ".ffn_b1"] = from_doubles(a.ffn_b1, {df});
  m[p + ".ffn_w2"] = from_doubles(a.ffn_w2, {df, d});
  m[p + ".ffn_b2"] = from_doubles(a.ffn_b2, {d});
  m[p + ".comb_w1"] = from_doubles(a.comb_w1, {d, df});
  m[p + ".comb_b1"] = from_doubles(a.comb_b1, {df});
  m[p + ".comb_w2"] = from_doubles(a.comb_w2, {df, d});
  m[p + ".comb_b2"] = from_doubles(a.comb_b2, {d});
  m[p + ".fc_w1"] = from_doubles(a.fc_w1, {d, d});
  m[p + ".fc_b1"] = from_doubles(a.fc_b1, {d});
  m[p + ".fc_w2"] = from_doubles(a.fc_w2, {d, d});
  m[p + ".fc_b2"] = from_doubles(a.fc_b2, {d});
}

AttentionParams unpack_attention(const TensorMap& m, const std::string& p) {
  AttentionParams a;
  const auto meta = to_doubles(need(m, p + ".meta"));
  if (meta.size() != 5) throw MalformedFile("model file: bad meta for " + p);
  a.heads = static_cast<int>(meta[0]);
  a.model_dim = static_cast<std::size_t>(meta[1]);
  a.head_dim = static_cast<std::size_t>(meta[2]);
  a.pos_dim = static_cast<std::size_t>(meta[3]);
  a.ffn_dim = static_cast<std::size_t>(meta[4]);
  a.seed = to_u64(need(m, p + ".seed"));
  for (int h = 0; h < a.heads; ++h) {
    const std::string sp = p + ".self" + std::to_string(h);
    const std::string cp = p + ".cross" + std::to_string(h);
    HeadWeights sh, ch;
    sh.wq = to_doubles(need(m, sp + ".wq"));
    sh.wk = to_doubles(need(m, sp + ".wk"));
    sh.wv = to_doubles(need(m, sp + ".wv"));
    sh.weq = to_doubles(need(m, sp + ".weq"));
    sh.wek = to_doubles(need(m, sp + ".wek"));
    ch.wq = to_doubles(need(m, cp + ".wq"));
    ch.wk = to_doubles(need(m, cp + ".wk"));
    ch.wv = to_doubles(need(m, cp + ".wv"));
    ch.weq = to_doubles(need(m, cp + ".weq"));
    ch.wek = to_doubles(need(m, cp + ".wek"));
    a.self_heads.push_back(std::move(sh));
    a.cross_heads.push_back(std::move(ch));
  }
  a.w_self_out = to_doubles(need(m, p + ".ws"));
  a.w_cross_out = to_doubles(need(m, p + ".wc"));
  a.ffn_w1 = to_doubles(need(m, p + ".ffn_w1"));
  a.ffn_b1 = to_doubles(need(m, p + ".ffn_b1"));
  a.ffn_w2 = to_doubles(need(m, p + ".ffn_w2"));
  a.ffn_b2 = to_doubles(need(m, p + ".ffn_b2"));
  a.comb_w1 = to_doubles(need(m, p + ".comb_w1"));
  a.comb_b1 = to_doubles(need(m, p + ".comb_b1"));
  a.comb_w2 = to_doubles(need(m, p + ".comb_w2"));
  a.comb_b2 = to_doubles(need(m, p + ".comb_b2"));
  a.fc_w1 = to_doubles(need(m, p + ".fc_w1"));
  a.fc_b1 = to_doubles(need(m, p + ".fc_b1"));
  a.fc_w2 = to_doubles(need(m, p + ".fc_w2"));
  a.fc_b2 = to_doubles(need(m, p + ".fc_b2"));
  a.validate();
  return a;
}

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw MalformedFile("model file: truncated");
  return v;
}

}  // namespace

ModelParams seeded_model(const ModelDims& dims, std::uint64_t seed) {
  ModelParams p;
  p.seed = seed;
  p.descriptor_seed = seed;
  p.patch_diffusion =
      DiffusionParams::seeded(dims.patch_dim, seed, "patch_diffusion");
  p.point_diffusion =
      DiffusionParams::seeded(dims.point_dim, seed, "point_diffusion");
  p.transformer = AttentionParams::seeded(dims.patch_dim, dims.heads,
                                          dims.head_dim, dims.pos_dim, seed,
                                          "transformer");
  p.window_attention = AttentionParams::seeded(
      dims.patch_dim, dims.heads, dims.head_dim, dims.pos_dim, seed,
      "window_attention");
  return p;
}

void save_model(const ModelParams& params, const std::string& path) {
  TensorMap tensors;
  tensors["meta.seed"] = from_u64(params.seed);
  tensors["descriptor.seed"] = from_u64(params.descriptor_seed);
  pack_diffusion(tensors, "patch_diffusion", params.patch_diffusion);
  pack_diffusion(tensors, "point_diffusion", params.point_diffusion);
  pack_attention(tensors, "transformer", params.transformer);
  pack_attention(tensors, "window_attention", params.window_attention);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("save_model: cannot open " + path);
  out.write(kMagic, 4);
  write_pod<std::uint16_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) write_pod<std::uint32_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * 4));
  }
  if (!out) throw IoFailure("save_model: write failed on " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("load_model: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw MalformedFile("load_model: bad magic in " + path);
  if (read_pod<std::uint16_t>(in) != kVersion)
    throw MalformedFile("load_model: unsupported version in " + path);

  TensorMap tensors;
  const std::uint32_t count = read_pod<std::uint32_t>(in);
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint16_t name_len = read_pod<std::uint16_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint8_t rank = read_pod<std::uint8_t>(in);
    Tensor tensor;
    for (std::uint8_t r = 0; r < rank; ++r)
      tensor.dims.push_back(read_pod<std::uint32_t>(in));
    tensor.data.resize(tensor.count());
    in.read(reinterpret_cast<char*>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.data.size() * 4));
    if (!in) throw MalformedFile("load_model: truncated tensor " + name);
    tensors.emplace(std::move(name), std::move(tensor));
  }

  ModelParams p;
  p.seed = to_u64(need(tensors, "meta.seed"));
  p.descriptor_seed = to_u64(need(tensors, "descriptor.seed"));
  p.patch_diffusion = unpack_diffusion(tensors, "patch_diffusion");
  p.point_diffusion = unpack_diffusion(tensors, "point_diffusion");
  p.transformer = unpack_attention(tensors, "transformer");
  p.window_attention = unpack_attention(tensors, "window_attention");
  return p;
}

}  // namespace diffreg
