#pragma once

#include <json.hpp>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vpip/image.hpp"
#include "vpip/nn/tape.hpp"
#include "vpip/rng.hpp"

namespace vpip::nn {

struct ModelConfig {
  std::vector<int> num_blocks{1, 1, 1, 1};
  std::vector<int> channels{16, 32, 64, 128};
  std::vector<int> heads{1, 2, 4, 8};
  int prompt_channels = 8;
  int window_size = 8;
  int image_size = 64;

  int levels() const { return static_cast<int>(channels.size()); }
  int down_factor() const { return 1 << (levels() - 1); }

  void validate() const {
    if (channels.size() < 2) throw std::invalid_argument("ModelConfig: need at least 2 levels");
    if (num_blocks.size() != channels.size() || heads.size() != channels.size())
      throw std::invalid_argument("ModelConfig: num_blocks/channels/heads must have equal length");
    for (size_t i = 1; i < channels.size(); ++i)
      if (channels[i] <= channels[i - 1])
        throw std::invalid_argument("ModelConfig: channels must be strictly increasing");
    for (size_t i = 0; i < channels.size(); ++i) {
      if (num_blocks[i] < 1) throw std::invalid_argument("ModelConfig: num_blocks must be >= 1");
      if (heads[i] < 1 || channels[i] % heads[i] != 0)
        throw std::invalid_argument("ModelConfig: channels[" + std::to_string(i) +
                                    "] must be divisible by heads[" + std::to_string(i) + "]");
    }
    if (prompt_channels < 1) throw std::invalid_argument("ModelConfig: prompt_channels must be >= 1");
    if (image_size % down_factor() != 0)
      throw std::invalid_argument("ModelConfig: image_size must be divisible by " +
                                  std::to_string(down_factor()));
    int latent = image_size / down_factor();
    if (window_size < 1 || latent % window_size != 0)
      throw std::invalid_argument("ModelConfig: window_size must divide image_size/" +
                                  std::to_string(down_factor()));
  }

  // Desk-scale triple mirroring the published Base/Large/Huge ratios.
  static ModelConfig desk(const std::string& scale) {
    ModelConfig c;
    if (scale == "tiny") {
      c.num_blocks = {1, 1, 1, 1};
      c.channels = {16, 32, 64, 128};
      c.prompt_channels = 8;
    } else if (scale == "large") {
      c.num_blocks = {1, 2, 2, 2};
      c.channels = {24, 48, 96, 192};
      c.prompt_channels = 12;
    } else if (scale == "huge") {
      c.num_blocks = {2, 2, 2, 3};
      c.channels = {32, 64, 128, 256};
      c.prompt_channels = 16;
    } else {
      throw std::invalid_argument("unknown desk scale: " + scale);
    }
    return c;
  }

  static ModelConfig paper(const std::string& scale) {
    ModelConfig c;
    c.image_size = 256;
    c.window_size = 8;
    if (scale == "base") {
      c.num_blocks = {2, 4, 4, 4};
      c.channels = {48, 96, 192, 384};
      c.prompt_channels = 32;
    } else if (scale == "large") {
      c.num_blocks = {4, 6, 6, 8};
      c.channels = {64, 128, 256, 512};
      c.prompt_channels = 64;
    } else if (scale == "huge") {
      c.num_blocks = {6, 8, 8, 12};
      c.channels = {80, 160, 320, 640};
      c.prompt_channels = 64;
    } else {
      throw std::invalid_argument("unknown paper scale: " + scale);
    }
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["num_blocks"] = num_blocks;
    j["channels"] = channels;
    j["heads"] = heads;
    j["prompt_channels"] = prompt_channels;
    j["window_size"] = window_size;
    j["image_size"] = image_size;
    return j;
  }

  static ModelConfig from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.num_blocks = j.at("num_blocks").get<std::vector<int>>();
    c.channels = j.at("channels").get<std::vector<int>>();
    c.heads = j.at("heads").get<std::vector<int>>();
    c.prompt_channels = j.at("prompt_channels").get<int>();
    c.window_size = j.at("window_size").get<int>();
    c.image_size = j.at("image_size").get<int>();
    return c;
  }

  bool operator==(const ModelConfig& o) const = default;
};

template <typename T>
struct ParamStore {
  std::map<std::string, Tensor<T>> params;

  bool has(const std::string& n) const { return params.count(n) > 0; }
  int64_t count_params() const {
    int64_t n = 0;
    for (const auto& [k, v] : params) n += v.numel();
    return n;
  }
};

enum class InitKind { trunc_normal, zeros, ones };

// Fine-tuning strategies map to parameter-name prefixes.
enum class FinetuneStrategy {
  prompt_encoder_only,
  plus_latent_blocks,
  plus_input_encoder,
  full,
  full_backbone,
};

FinetuneStrategy strategy_from_name(const std::string& s);
std::string strategy_name(FinetuneStrategy s);

template <typename T>
class GenLV;

// Per-forward binding of store parameters to tape nodes. In init mode,
// missing parameters are created (name-seeded), so one dummy forward in
// build() is the single source of truth for the parameter set.
template <typename T>
struct Binder {
  Tape<T>* tape = nullptr;
  GenLV<T>* model = nullptr;
  const std::set<std::string>* trainable = nullptr;  // null: nothing trainable
  bool init_mode = false;
  std::map<std::string, int> nodes;

  int param(const std::string& name, const std::vector<int>& shape, InitKind kind);
};

struct ShapeTrace {
  std::vector<std::pair<std::string, std::vector<int>>> items;
};

template <typename T>
class GenLV {
 public:
  ModelConfig config;
  ParamStore<T> store;
  uint64_t init_seed = 0;

  GenLV() = default;

  static GenLV build(const ModelConfig& cfg, uint64_t seed) {
    cfg.validate();
    GenLV m;
    m.config = cfg;
    m.init_seed = seed;
    // one dummy forward in init mode creates every parameter
    Tape<T> tape;
    tape.grad_enabled = false;
    Binder<T> b{&tape, &m, nullptr, true, {}};
    int s = cfg.image_size;
    int in = tape.input(Tensor<T>({1, 3, s, s}, T(0)));
    int ps = tape.input(Tensor<T>({1, 3, s, s}, T(0)));
    int pt = tape.input(Tensor<T>({1, 3, s, s}, T(0)));
    auto [zs, zt] = m.prompt_encode_nodes(tape, b, ps, pt);
    m.backbone_nodes(tape, b, in, zs, zt);
    return m;
  }

  static GenLV from_store(const ModelConfig& cfg, ParamStore<T> st) {
    cfg.validate();
    GenLV m;
    m.config = cfg;
    m.store = std::move(st);
    return m;
  }

  Binder<T> bind(Tape<T>& tape, const std::set<std::string>* trainable = nullptr) {
    return Binder<T>{&tape, this, trainable, false, {}};
  }

  // Encodes both prompt images with the same weights, separately.
  std::pair<int, int> prompt_encode_nodes(Tape<T>& g, Binder<T>& b, int psrc, int ptgt) {
    int zs = prompt_tower(g, b, psrc);
    int zt = prompt_tower(g, b, ptgt);
    return {zs, zt};
  }

  int backbone_nodes(Tape<T>& g, Binder<T>& b, int input, int zs, int zt,
                     ShapeTrace* trace = nullptr) {
    const auto& cfg = config;
    const int L = cfg.levels();
    check_spatial(g.val(input).shape, "backbone input");
    check_latent(g.val(zs).shape, "z_source");
    check_latent(g.val(zt).shape, "z_target");

    int x = conv(g, b, "backbone.stem", input, cfg.channels[0], 3, 1, 1, InitKind::trunc_normal);
    std::vector<int> skips;
    for (int l = 0; l + 1 < L; ++l) {
      for (int j = 0; j < cfg.num_blocks[l]; ++j) {
        std::string pfx = "backbone.enc" + std::to_string(l) + ".block" + std::to_string(j);
        x = tsab(g, b, pfx + ".tsab", x, cfg.heads[l]);
        x = ssab(g, b, pfx + ".ssab", x, cfg.heads[l], cfg.window_size);
      }
      if (trace)
        trace->items.emplace_back("encoder_level" + std::to_string(l), g.val(x).shape);
      skips.push_back(x);
      x = conv(g, b, "backbone.down" + std::to_string(l), x, cfg.channels[l + 1], 3, 2, 1,
               InitKind::trunc_normal);
    }
    for (int j = 0; j < cfg.num_blocks[L - 1]; ++j) {
      std::string pfx = "backbone.mid.block" + std::to_string(j);
      x = tsab(g, b, pfx + ".tsab", x, cfg.heads[L - 1]);
      x = pcab(g, b, pfx + ".pcab", x, zs, zt, cfg.heads[L - 1]);
    }
    if (trace) trace->items.emplace_back("bottleneck", g.val(x).shape);
    for (int l = L - 2; l >= 0; --l) {
      x = conv(g, b, "backbone.up" + std::to_string(l) + ".proj", x, 4 * cfg.channels[l], 1, 1, 0,
               InitKind::trunc_normal);
      x = g.pixel_shuffle2(x);
      x = g.concat_chan(x, skips[l]);
      x = conv(g, b, "backbone.skip" + std::to_string(l), x, cfg.channels[l], 1, 1, 0,
               InitKind::trunc_normal);
      for (int j = 0; j < cfg.num_blocks[l]; ++j) {
        std::string pfx = "backbone.dec" + std::to_string(l) + ".block" + std::to_string(j);
        x = tsab(g, b, pfx + ".tsab", x, cfg.heads[l]);
        x = ssab(g, b, pfx + ".ssab", x, cfg.heads[l], cfg.window_size);
      }
      if (trace)
        trace->items.emplace_back("decoder_level" + std::to_string(l), g.val(x).shape);
    }
    int r = conv(g, b, "backbone.head", x, 3, 3, 1, 1, InitKind::zeros);
    return g.clamp01(g.add(input, r));
  }

  int forward_nodes(Tape<T>& g, Binder<T>& b, int input, int psrc, int ptgt,
                    ShapeTrace* trace = nullptr) {
    auto [zs, zt] = prompt_encode_nodes(g, b, psrc, ptgt);
    return backbone_nodes(g, b, input, zs, zt, trace);
  }

  // ---- convenience inference on images -----------------------------------

  Tensor<T> latent_zeros(int n) const {
    int s = config.image_size / config.down_factor();
    return Tensor<T>({n, config.channels.back(), s, s}, T(0));
  }

  Image forward_full(const Image& input, const Image& psrc, const Image& ptgt,
                     bool prompt_blind = false) const {
    Tape<T> g;
    g.grad_enabled = false;
    auto* self = const_cast<GenLV*>(this);
    Binder<T> b = self->bind(g);
    int in = g.input(image_to_tensor(input));
    int out;
    if (prompt_blind) {
      int zs = g.input(latent_zeros(1));
      int zt = g.input(latent_zeros(1));
      out = self->backbone_nodes(g, b, in, zs, zt);
    } else {
      int ps = g.input(image_to_tensor(psrc));
      int pt = g.input(image_to_tensor(ptgt));
      out = self->forward_nodes(g, b, in, ps, pt);
    }
    return tensor_to_image(g.val(out), 0);
  }

  // ---- tensor/image conversion -------------------------------------------

  static Tensor<T> image_to_tensor(const Image& img) {
    Tensor<T> t({1, 3, img.height, img.width});
    const Image src = img.channels == 3 ? img : replicate3(img);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
          t.ptr()[(static_cast<int64_t>(c) * img.height + y) * img.width + x] =
              static_cast<T>(src.at(y, x, c));
    return t;
  }

  static Tensor<T> images_to_batch(const std::vector<Image>& imgs) {
    if (imgs.empty()) throw std::invalid_argument("images_to_batch: empty");
    const int H = imgs[0].height, W = imgs[0].width;
    Tensor<T> t({static_cast<int>(imgs.size()), 3, H, W});
    for (size_t n = 0; n < imgs.size(); ++n) {
      if (imgs[n].height != H || imgs[n].width != W)
        throw std::invalid_argument("images_to_batch: mixed sizes");
      const Image src = imgs[n].channels == 3 ? imgs[n] : replicate3(imgs[n]);
      for (int c = 0; c < 3; ++c)
        for (int y = 0; y < H; ++y)
          for (int x = 0; x < W; ++x)
            t.ptr()[((static_cast<int64_t>(n) * 3 + c) * H + y) * W + x] =
                static_cast<T>(src.at(y, x, c));
    }
    return t;
  }

  static Image tensor_to_image(const Tensor<T>& t, int n) {
    if (t.rank() != 4 || t.dim(1) != 3) throw std::invalid_argument("tensor_to_image: bad shape");
    const int H = t.dim(2), W = t.dim(3);
    Image img(H, W, 3);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          img.at(y, x, c) = static_cast<double>(
              t.ptr()[((static_cast<int64_t>(n) * 3 + c) * H + y) * W + x]);
    clamp01(img);
    return img;
  }

  // ---- building blocks -----------------------------------------------------

  int conv(Tape<T>& g, Binder<T>& b, const std::string& name, int x, int cout, int k, int stride,
           int pad, InitKind kind) {
    int cin = g.val(x).shape[1];
    int w = b.param(name + ".w", {cout, cin, k, k}, kind);
    int bias = b.param(name + ".b", {cout}, InitKind::zeros);
    return g.conv2d(x, w, bias, stride, pad);
  }

  int layernorm(Tape<T>& g, Binder<T>& b, const std::string& name, int x) {
    int C = g.val(x).shape[1];
    int gm = b.param(name + ".g", {C}, InitKind::ones);
    int bt = b.param(name + ".b", {C}, InitKind::zeros);
    return g.layernorm_chan(x, gm, bt);
  }

  // gated convolutional feed-forward, expansion factor 2
  int gdfn(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x) {
    int C = g.val(x).shape[1];
    int hidden = 2 * C;
    int y = layernorm(g, b, pfx + ".ln", x);
    y = conv(g, b, pfx + ".in", y, 2 * hidden, 1, 1, 0, InitKind::trunc_normal);
    int dw_w = b.param(pfx + ".dw.w", {2 * hidden, 3, 3}, InitKind::trunc_normal);
    int dw_b = b.param(pfx + ".dw.b", {2 * hidden}, InitKind::zeros);
    y = g.dwconv3x3(y, dw_w, dw_b);
    int a = g.slice_chan(y, 0, hidden);
    int v = g.slice_chan(y, hidden, 2 * hidden);
    int z = g.mul(g.gelu(a), v);
    z = conv(g, b, pfx + ".out", z, C, 1, 1, 0, InitKind::trunc_normal);
    return g.add(x, z);
  }

  // transposed (channel) attention sub-block, pre-residual
  int tsab_attn(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x, int heads) {
    const auto& xs = g.val(x).shape;
    const int N = xs[0], C = xs[1], H = xs[2], W = xs[3];
    const int d = C / heads;
    int y = layernorm(g, b, pfx + ".ln", x);
    y = conv(g, b, pfx + ".qkv", y, 3 * C, 1, 1, 0, InitKind::trunc_normal);
    int dw_w = b.param(pfx + ".qkv_dw.w", {3 * C, 3, 3}, InitKind::trunc_normal);
    int dw_b = b.param(pfx + ".qkv_dw.b", {3 * C}, InitKind::zeros);
    y = g.dwconv3x3(y, dw_w, dw_b);
    int q = g.reshape(g.slice_chan(y, 0, C), {N * heads, d, H * W});
    int k = g.reshape(g.slice_chan(y, C, 2 * C), {N * heads, d, H * W});
    int v = g.reshape(g.slice_chan(y, 2 * C, 3 * C), {N * heads, d, H * W});
    q = g.l2norm_rows(q);
    k = g.l2norm_rows(k);
    int att = g.bmm(q, k, false, true);  // (N*heads, d, d)
    int tau = b.param(pfx + ".tau", {heads}, InitKind::ones);
    att = g.scale_rowgroups(att, tau, heads);
    att = g.softmax_rows(att);
    int o = g.bmm(att, v, false, false);
    o = g.reshape(o, {N, C, H, W});
    return conv(g, b, pfx + ".out", o, C, 1, 1, 0, InitKind::trunc_normal);
  }

  int tsab(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x, int heads) {
    x = g.add(x, tsab_attn(g, b, pfx, x, heads));
    return gdfn(g, b, pfx + ".ffn", x);
  }

  // windowed spatial attention sub-block, pre-residual
  int ssab_attn(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x, int heads, int win) {
    const auto& xs = g.val(x).shape;
    const int N = xs[0], C = xs[1], H = xs[2], W = xs[3];
    if (H % win != 0 || W % win != 0)
      throw std::invalid_argument("ssab: window must divide spatial dims");
    const int d = C / heads;
    int y = layernorm(g, b, pfx + ".ln", x);
    y = conv(g, b, pfx + ".qkv", y, 3 * C, 1, 1, 0, InitKind::trunc_normal);
    int q = g.window_tokens(g.slice_chan(y, 0, C), win, heads);
    int k = g.window_tokens(g.slice_chan(y, C, 2 * C), win, heads);
    int v = g.window_tokens(g.slice_chan(y, 2 * C, 3 * C), win, heads);
    int att = g.bmm(q, k, false, true);
    att = g.scale(att, static_cast<T>(1.0 / std::sqrt(static_cast<double>(d))));
    att = g.softmax_rows(att);
    int o = g.bmm(att, v, false, false);
    o = g.window_untokens(o, N, C, H, W, win, heads);
    return conv(g, b, pfx + ".out", o, C, 1, 1, 0, InitKind::trunc_normal);
  }

  int ssab(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x, int heads, int win) {
    x = g.add(x, ssab_attn(g, b, pfx, x, heads, win));
    return gdfn(g, b, pfx + ".ffn", x);
  }

  // prompt cross-attention sub-block, pre-residual:
  // queries from the latent, keys from the prompt-source latent,
  // values from the prompt-target latent
  int pcab_attn(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x, int zs, int zt,
                int heads) {
    const auto& xs = g.val(x).shape;
    if (g.val(zs).shape != xs || g.val(zt).shape != xs)
      throw std::invalid_argument("pcab: latent and prompt shapes must match");
    const int N = xs[0], C = xs[1], H = xs[2], W = xs[3];
    if (H != W) throw std::invalid_argument("pcab: expected square latent");
    const int d = C / heads;
    int yq = layernorm(g, b, pfx + ".ln_q", x);
    int yk = layernorm(g, b, pfx + ".ln_k", zs);
    int yv = layernorm(g, b, pfx + ".ln_v", zt);
    int q = conv(g, b, pfx + ".wq", yq, C, 1, 1, 0, InitKind::trunc_normal);
    int k = conv(g, b, pfx + ".wk", yk, C, 1, 1, 0, InitKind::trunc_normal);
    int v = conv(g, b, pfx + ".wv", yv, C, 1, 1, 0, InitKind::trunc_normal);
    int qt = g.window_tokens(q, H, heads);  // all spatial positions as tokens
    int kt = g.window_tokens(k, H, heads);
    int vt = g.window_tokens(v, H, heads);
    int att = g.bmm(qt, kt, false, true);
    att = g.scale(att, static_cast<T>(1.0 / std::sqrt(static_cast<double>(d))));
    att = g.softmax_rows(att);
    int o = g.bmm(att, vt, false, false);
    o = g.window_untokens(o, N, C, H, W, H, heads);
    return conv(g, b, pfx + ".out", o, C, 1, 1, 0, InitKind::trunc_normal);
  }

  int pcab(Tape<T>& g, Binder<T>& b, const std::string& pfx, int x, int zs, int zt, int heads) {
    x = g.add(x, pcab_attn(g, b, pfx, x, zs, zt, heads));
    return gdfn(g, b, pfx + ".ffn", x);
  }

 private:
  int prompt_tower(Tape<T>& g, Binder<T>& b, int p) {
    check_spatial(g.val(p).shape, "prompt image");
    const int L = config.levels();
    int pc = config.prompt_channels;
    int x = conv(g, b, "prompt_encoder.stem", p, pc, 3, 1, 1, InitKind::trunc_normal);
    for (int l = 0; l + 1 < L; ++l) {
      for (int j = 0; j < 4; ++j) {
        std::string pfx = "prompt_encoder.level" + std::to_string(l) + ".res" + std::to_string(j);
        int y = conv(g, b, pfx + ".conv1", x, pc, 3, 1, 1, InitKind::trunc_normal);
        y = g.relu(y);
        y = conv(g, b, pfx + ".conv2", y, pc, 3, 1, 1, InitKind::trunc_normal);
        x = g.add(x, y);
      }
      x = conv(g, b, "prompt_encoder.down" + std::to_string(l), x, 2 * pc, 3, 2, 1,
               InitKind::trunc_normal);
      pc *= 2;
    }
    return conv(g, b, "prompt_encoder.proj", x, config.channels.back(), 1, 1, 0,
                InitKind::trunc_normal);
  }

  void check_spatial(const std::vector<int>& s, const char* what) const {
    if (s.size() != 4 || s[1] != 3 || s[2] != config.image_size || s[3] != config.image_size)
      throw std::invalid_argument(std::string(what) + ": expected (N,3," +
                                  std::to_string(config.image_size) + "," +
                                  std::to_string(config.image_size) + "), got " + shape_str(s));
  }

  void check_latent(const std::vector<int>& s, const char* what) const {
    int ls = config.image_size / config.down_factor();
    if (s.size() != 4 || s[1] != config.channels.back() || s[2] != ls || s[3] != ls)
      throw std::invalid_argument(std::string(what) + ": expected latent (N," +
                                  std::to_string(config.channels.back()) + "," +
                                  std::to_string(ls) + "," + std::to_string(ls) + "), got " +
                                  shape_str(s));
  }
};

template <typename T>
int Binder<T>::param(const std::string& name, const std::vector<int>& shape, InitKind kind) {
  auto it = nodes.find(name);
  if (it != nodes.end()) return it->second;
  if (!model->store.has(name)) {
    if (!init_mode)
      throw std::runtime_error("checkpoint/config mismatch: missing parameter '" + name + "'");
    Tensor<T> t(shape, T(0));
    if (kind == InitKind::ones) {
      for (auto& v : t.data) v = T(1);
    } else if (kind == InitKind::trunc_normal) {
      Rng rng(hash_combine(model->init_seed, fnv1a(name)));
      for (auto& v : t.data) v = static_cast<T>(rng.trunc_normal(0.02));
    }
    model->store.params.emplace(name, std::move(t));
  }
  const Tensor<T>& stored = model->store.params.at(name);
  if (stored.shape != shape)
    throw std::runtime_error("checkpoint/config mismatch: parameter '" + name + "' has shape " +
                             shape_str(stored.shape) + ", expected " + shape_str(shape));
  bool rg = trainable && trainable->count(name) > 0;
  int node = tape->input(stored, rg);
  nodes.emplace(name, node);
  return node;
}

// Trainable-parameter name sets for the five fine-tuning strategies.
template <typename T>
std::set<std::string> select_trainable(const ParamStore<T>& store, FinetuneStrategy s) {
  auto starts_with = [](const std::string& v, const std::string& p) {
    return v.rfind(p, 0) == 0;
  };
  std::set<std::string> out;
  for (const auto& [name, t] : store.params) {
    bool take = false;
    switch (s) {
      case FinetuneStrategy::full: take = true; break;
      case FinetuneStrategy::full_backbone: take = starts_with(name, "backbone."); break;
      case FinetuneStrategy::prompt_encoder_only:
        take = starts_with(name, "prompt_encoder.");
        break;
      case FinetuneStrategy::plus_latent_blocks:
        take = starts_with(name, "prompt_encoder.") || starts_with(name, "backbone.mid.");
        break;
      case FinetuneStrategy::plus_input_encoder:
        take = starts_with(name, "prompt_encoder.") || starts_with(name, "backbone.mid.") ||
               starts_with(name, "backbone.stem") || starts_with(name, "backbone.enc") ||
               starts_with(name, "backbone.down");
        break;
    }
    if (take) out.insert(name);
  }
  return out;
}

inline FinetuneStrategy strategy_from_name(const std::string& s) {
  if (s == "prompt_encoder_only") return FinetuneStrategy::prompt_encoder_only;
  if (s == "plus_latent_blocks") return FinetuneStrategy::plus_latent_blocks;
  if (s == "plus_input_encoder") return FinetuneStrategy::plus_input_encoder;
  if (s == "full") return FinetuneStrategy::full;
  if (s == "full_backbone") return FinetuneStrategy::full_backbone;
  throw std::invalid_argument("unknown finetune strategy: " + s);
}

inline std::string strategy_name(FinetuneStrategy s) {
  switch (s) {
    case FinetuneStrategy::prompt_encoder_only: return "prompt_encoder_only";
    case FinetuneStrategy::plus_latent_blocks: return "plus_latent_blocks";
    case FinetuneStrategy::plus_input_encoder: return "plus_input_encoder";
    case FinetuneStrategy::full: return "full";
    case FinetuneStrategy::full_backbone: return "full_backbone";
  }
  return "?";
}

}  // namespace vpip::nn
