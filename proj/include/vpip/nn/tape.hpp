#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "vpip/nn/tensor.hpp"

namespace vpip::nn {

// Reverse-mode autograd over dense tensors. Ops execute eagerly and record
// backward closures; backward() replays them in reverse creation order.
// Feature maps are (N, C, H, W); token tensors are (B, T, d).
template <typename T>
class Tape {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MapM = Eigen::Map<Mat>;
  using MapC = Eigen::Map<const Mat>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled = true;

  int input(Tensor<T> v, bool requires_grad = false) {
    return make_node(std::move(v), requires_grad && grad_enabled, nullptr);
  }

  const Tensor<T>& val(int id) const { return nodes_[id].value; }
  Tensor<T>& val(int id) { return nodes_[id].value; }

  const Tensor<T>& grad(int id) const { return nodes_[id].grad; }

  size_t size() const { return nodes_.size(); }

  void backward(int loss_id) {
    if (val(loss_id).numel() != 1) throw std::logic_error("backward: loss must be scalar");
    for (auto& n : nodes_)
      if (n.requires_grad && n.grad.data.empty()) n.grad = Tensor<T>(n.value.shape, T(0));
    nodes_[loss_id].grad.data[0] = T(1);
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
      if (nodes_[i].back && nodes_[i].requires_grad) nodes_[i].back();
  }

  // ---- elementwise -------------------------------------------------------

  int add(int a, int b) {
    check_same(a, b, "add");
    Tensor<T> out = val(a);
    const auto& bv = val(b).data;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv[i];
    return unary_or_binary(std::move(out), a, b, [this](int y, int pa, int pb) {
      const auto& g = grad(y).data;
      accumulate(pa, g);
      accumulate(pb, g);
    });
  }

  int sub(int a, int b) {
    check_same(a, b, "sub");
    Tensor<T> out = val(a);
    const auto& bv = val(b).data;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= bv[i];
    return unary_or_binary(std::move(out), a, b, [this](int y, int pa, int pb) {
      const auto& g = grad(y).data;
      accumulate(pa, g);
      accumulate_neg(pb, g);
    });
  }

  int mul(int a, int b) {
    check_same(a, b, "mul");
    Tensor<T> out = val(a);
    const auto& bv = val(b).data;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bv[i];
    return unary_or_binary(std::move(out), a, b, [this](int y, int pa, int pb) {
      const auto& g = grad(y).data;
      if (wants(pa)) {
        auto& ga = grad_ref(pa).data;
        const auto& bvv = val(pb).data;
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bvv[i];
      }
      if (wants(pb)) {
        auto& gb = grad_ref(pb).data;
        const auto& avv = val(pa).data;
        for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * avv[i];
      }
    });
  }

  int scale(int a, T s) {
    Tensor<T> out = val(a);
    for (auto& v : out.data) v *= s;
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a, s]() {
      if (!wants(a)) return;
      const auto& g = grad(y).data;
      auto& ga = grad_ref(a).data;
      for (size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
    });
    return y;
  }

  int relu(int a) {
    Tensor<T> out = val(a);
    for (auto& v : out.data) v = v > T(0) ? v : T(0);
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a]() {
      if (!wants(a)) return;
      const auto& g = grad(y).data;
      const auto& x = val(a).data;
      auto& ga = grad_ref(a).data;
      for (size_t i = 0; i < g.size(); ++i) ga[i] += x[i] > T(0) ? g[i] : T(0);
    });
    return y;
  }

  int gelu(int a) {
    static const T inv_sqrt2 = T(1) / std::sqrt(T(2));
    static const T inv_sqrt2pi = T(1) / std::sqrt(T(2) * T(M_PI));
    Tensor<T> out = val(a);
    for (auto& v : out.data) v = T(0.5) * v * (T(1) + std::erf(v * inv_sqrt2));
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a]() {
      if (!wants(a)) return;
      const auto& g = grad(y).data;
      const auto& x = val(a).data;
      auto& ga = grad_ref(a).data;
      for (size_t i = 0; i < g.size(); ++i) {
        T cdf = T(0.5) * (T(1) + std::erf(x[i] * inv_sqrt2));
        T pdf = std::exp(T(-0.5) * x[i] * x[i]) * inv_sqrt2pi;
        ga[i] += g[i] * (cdf + x[i] * pdf);
      }
    });
    return y;
  }

  int abs(int a) {
    Tensor<T> out = val(a);
    for (auto& v : out.data) v = std::abs(v);
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a]() {
      if (!wants(a)) return;
      const auto& g = grad(y).data;
      const auto& x = val(a).data;
      auto& ga = grad_ref(a).data;
      for (size_t i = 0; i < g.size(); ++i)
        ga[i] += x[i] > T(0) ? g[i] : (x[i] < T(0) ? -g[i] : T(0));
    });
    return y;
  }

  // clamp to [0,1]; gradient passes through inside the range
  int clamp01(int a) {
    Tensor<T> out = val(a);
    for (auto& v : out.data) v = std::min(T(1), std::max(T(0), v));
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a]() {
      if (!wants(a)) return;
      const auto& g = grad(y).data;
      const auto& x = val(a).data;
      auto& ga = grad_ref(a).data;
      for (size_t i = 0; i < g.size(); ++i)
        if (x[i] >= T(0) && x[i] <= T(1)) ga[i] += g[i];
    });
    return y;
  }

  int mean_all(int a) {
    const auto& x = val(a).data;
    T s = 0;
    for (T v : x) s += v;
    Tensor<T> out({1});
    out.data[0] = s / static_cast<T>(x.size());
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a]() {
      if (!wants(a)) return;
      T g = grad(y).data[0] / static_cast<T>(val(a).numel());
      auto& ga = grad_ref(a).data;
      for (auto& v : ga) v += g;
    });
    return y;
  }

  int reshape(int a, std::vector<int> shape) {
    if (Tensor<T>::count(shape) != val(a).numel())
      throw std::invalid_argument("reshape: element count mismatch");
    Tensor<T> out;
    out.shape = std::move(shape);
    out.data = val(a).data;
    int y = make_from(std::move(out), {a});
    attach(y, [this, y, a]() {
      if (!wants(a)) return;
      accumulate(a, grad(y).data);
    });
    return y;
  }

  // ---- NCHW helpers -----------------------------------------------------

  int add_bias(int x, int b) {
    const auto& xs = val(x).shape;
    if (xs.size() != 4 || val(b).shape != std::vector<int>{xs[1]})
      throw std::invalid_argument("add_bias: expected (N,C,H,W) and (C)");
    Tensor<T> out = val(x);
    const int N = xs[0], C = xs[1], HW = xs[2] * xs[3];
    const auto& bv = val(b).data;
    for (int n = 0; n < N; ++n)
      for (int c = 0; c < C; ++c) {
        T* p = out.ptr() + (static_cast<int64_t>(n) * C + c) * HW;
        for (int i = 0; i < HW; ++i) p[i] += bv[c];
      }
    return unary_or_binary(std::move(out), x, b, [this, N, C, HW](int y, int px, int pb) {
      const auto& g = grad(y).data;
      accumulate(px, g);
      if (wants(pb)) {
        auto& gb = grad_ref(pb).data;
        for (int n = 0; n < N; ++n)
          for (int c = 0; c < C; ++c) {
            const T* p = g.data() + (static_cast<int64_t>(n) * C + c) * HW;
            T s = 0;
            for (int i = 0; i < HW; ++i) s += p[i];
            gb[c] += s;
          }
      }
    });
  }

  int concat_chan(int a, int b) {
    const auto& as = val(a).shape;
    const auto& bs = val(b).shape;
    if (as.size() != 4 || bs.size() != 4 || as[0] != bs[0] || as[2] != bs[2] || as[3] != bs[3])
      throw std::invalid_argument("concat_chan: shape mismatch");
    const int N = as[0], Ca = as[1], Cb = bs[1], HW = as[2] * as[3];
    Tensor<T> out({N, Ca + Cb, as[2], as[3]});
    for (int n = 0; n < N; ++n) {
      std::copy_n(val(a).ptr() + static_cast<int64_t>(n) * Ca * HW, static_cast<int64_t>(Ca) * HW,
                  out.ptr() + static_cast<int64_t>(n) * (Ca + Cb) * HW);
      std::copy_n(val(b).ptr() + static_cast<int64_t>(n) * Cb * HW, static_cast<int64_t>(Cb) * HW,
                  out.ptr() + static_cast<int64_t>(n) * (Ca + Cb) * HW + static_cast<int64_t>(Ca) * HW);
    }
    return unary_or_binary(std::move(out), a, b, [this, N, Ca, Cb, HW](int y, int pa, int pb) {
      const auto& g = grad(y).data;
      if (wants(pa)) {
        auto& ga = grad_ref(pa).data;
        for (int n = 0; n < N; ++n)
          for (int64_t i = 0; i < static_cast<int64_t>(Ca) * HW; ++i)
            ga[static_cast<int64_t>(n) * Ca * HW + i] += g[static_cast<int64_t>(n) * (Ca + Cb) * HW + i];
      }
      if (wants(pb)) {
        auto& gb = grad_ref(pb).data;
        for (int n = 0; n < N; ++n)
          for (int64_t i = 0; i < static_cast<int64_t>(Cb) * HW; ++i)
            gb[static_cast<int64_t>(n) * Cb * HW + i] +=
                g[static_cast<int64_t>(n) * (Ca + Cb) * HW + static_cast<int64_t>(Ca) * HW + i];
      }
    });
  }

  int slice_chan(int x, int c0, int c1) {
    const auto& xs = val(x).shape;
    if (xs.size() != 4 || c0 < 0 || c1 <= c0 || c1 > xs[1])
      throw std::invalid_argument("slice_chan: bad channel range");
    const int N = xs[0], C = xs[1], HW = xs[2] * xs[3], Cs = c1 - c0;
    Tensor<T> out({N, Cs, xs[2], xs[3]});
    for (int n = 0; n < N; ++n)
      std::copy_n(val(x).ptr() + (static_cast<int64_t>(n) * C + c0) * HW,
                  static_cast<int64_t>(Cs) * HW, out.ptr() + static_cast<int64_t>(n) * Cs * HW);
    int y = make_from(std::move(out), {x});
    attach(y, [this, y, x, N, C, HW, Cs, c0]() {
      if (!wants(x)) return;
      const auto& g = grad(y).data;
      auto& gx = grad_ref(x).data;
      for (int n = 0; n < N; ++n)
        for (int64_t i = 0; i < static_cast<int64_t>(Cs) * HW; ++i)
          gx[(static_cast<int64_t>(n) * C + c0) * HW + i] += g[static_cast<int64_t>(n) * Cs * HW + i];
    });
    return y;
  }

  // (N, 4C, H, W) -> (N, C, 2H, 2W)
  int pixel_shuffle2(int x) {
    const auto& xs = val(x).shape;
    if (xs.size() != 4 || xs[1] % 4 != 0)
      throw std::invalid_argument("pixel_shuffle2: channels must be divisible by 4");
    const int N = xs[0], C = xs[1] / 4, H = xs[2], W = xs[3];
    Tensor<T> out({N, C, 2 * H, 2 * W});
    const T* in = val(x).ptr();
    T* op = out.ptr();
    auto in_idx = [&](int n, int c, int y, int xx) {
      return ((static_cast<int64_t>(n) * xs[1] + c) * H + y) * W + xx;
    };
    auto out_idx = [&](int n, int c, int y, int xx) {
      return ((static_cast<int64_t>(n) * C + c) * 2 * H + y) * 2 * W + xx;
    };
    for (int n = 0; n < N; ++n)
      for (int c = 0; c < C; ++c)
        for (int y = 0; y < H; ++y)
          for (int xx = 0; xx < W; ++xx)
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx)
                op[out_idx(n, c, 2 * y + dy, 2 * xx + dx)] =
                    in[in_idx(n, c * 4 + dy * 2 + dx, y, xx)];
    int yid = make_from(std::move(out), {x});
    attach(yid, [this, yid, x, N, C, H, W, xs]() {
      if (!wants(x)) return;
      const T* g = grad(yid).ptr();
      T* gx = grad_ref(x).ptr();
      auto in_idx = [&](int n, int c, int y, int xx) {
        return ((static_cast<int64_t>(n) * xs[1] + c) * H + y) * W + xx;
      };
      auto out_idx = [&](int n, int c, int y, int xx) {
        return ((static_cast<int64_t>(n) * C + c) * 2 * H + y) * 2 * W + xx;
      };
      for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
          for (int y = 0; y < H; ++y)
            for (int xx = 0; xx < W; ++xx)
              for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx)
                  gx[in_idx(n, c * 4 + dy * 2 + dx, y, xx)] +=
                      g[out_idx(n, c, 2 * y + dy, 2 * xx + dx)];
    });
    return yid;
  }

  // ---- convolutions -----------------------------------------------------

  // x (N,Cin,H,W), w (Cout,Cin,kh,kw), b (Cout); zero padding
  int conv2d(int x, int w, int b, int stride, int pad) {
    const auto& xs = val(x).shape;
    const auto& ws = val(w).shape;
    if (xs.size() != 4 || ws.size() != 4 || xs[1] != ws[1])
      throw std::invalid_argument("conv2d: shape mismatch");
    const int N = xs[0], Cin = xs[1], H = xs[2], W = xs[3];
    const int Cout = ws[0], kh = ws[2], kw = ws[3];
    if (val(b).shape != std::vector<int>{Cout}) throw std::invalid_argument("conv2d: bad bias");
    const int Ho = (H + 2 * pad - kh) / stride + 1;
    const int Wo = (W + 2 * pad - kw) / stride + 1;
    if (Ho < 1 || Wo < 1) throw std::invalid_argument("conv2d: output would be empty");

    Tensor<T> out({N, Cout, Ho, Wo});
    const int K = Cin * kh * kw;
    std::vector<T> col(static_cast<size_t>(K) * Ho * Wo);
    MapC wm(val(w).ptr(), Cout, K);
    for (int n = 0; n < N; ++n) {
      im2col(val(x).ptr() + static_cast<int64_t>(n) * Cin * H * W, Cin, H, W, kh, kw, stride, pad,
             Ho, Wo, col.data());
      MapC cm(col.data(), K, Ho * Wo);
      MapM om(out.ptr() + static_cast<int64_t>(n) * Cout * Ho * Wo, Cout, Ho * Wo);
      om.noalias() = wm * cm;
      const auto& bv = val(b).data;
      for (int c = 0; c < Cout; ++c) om.row(c).array() += bv[c];
    }
    int y = make_node_multi(std::move(out), {x, w, b});
    attach(y, [this, y, x, w, b, N, Cin, H, W, Cout, kh, kw, stride, pad, Ho, Wo, K]() {
      const auto& g = grad(y);
      std::vector<T> col(static_cast<size_t>(K) * Ho * Wo);
      if (wants(b)) {
        auto& gb = grad_ref(b).data;
        for (int n = 0; n < N; ++n) {
          MapC gm(g.ptr() + static_cast<int64_t>(n) * Cout * Ho * Wo, Cout, Ho * Wo);
          for (int c = 0; c < Cout; ++c) gb[c] += gm.row(c).sum();
        }
      }
      if (wants(w)) {
        MapM gw(grad_ref(w).ptr(), Cout, K);
        for (int n = 0; n < N; ++n) {
          im2col(val(x).ptr() + static_cast<int64_t>(n) * Cin * H * W, Cin, H, W, kh, kw, stride,
                 pad, Ho, Wo, col.data());
          MapC cm(col.data(), K, Ho * Wo);
          MapC gm(g.ptr() + static_cast<int64_t>(n) * Cout * Ho * Wo, Cout, Ho * Wo);
          gw.noalias() += gm * cm.transpose();
        }
      }
      if (wants(x)) {
        MapC wm(val(w).ptr(), Cout, K);
        for (int n = 0; n < N; ++n) {
          MapC gm(g.ptr() + static_cast<int64_t>(n) * Cout * Ho * Wo, Cout, Ho * Wo);
          MapM cm(col.data(), K, Ho * Wo);
          cm.noalias() = wm.transpose() * gm;
          col2im_add(col.data(), Cin, H, W, kh, kw, stride, pad, Ho, Wo,
                     grad_ref(x).ptr() + static_cast<int64_t>(n) * Cin * H * W);
        }
      }
    });
    return y;
  }

  // depthwise 3x3, stride 1, zero pad 1; w (C,3,3), b (C)
  int dwconv3x3(int x, int w, int b) {
    const auto& xs = val(x).shape;
    if (xs.size() != 4) throw std::invalid_argument("dwconv3x3: expected (N,C,H,W)");
    const int N = xs[0], C = xs[1], H = xs[2], W = xs[3];
    if (val(w).shape != std::vector<int>{C, 3, 3} || val(b).shape != std::vector<int>{C})
      throw std::invalid_argument("dwconv3x3: bad weight/bias shape");
    Tensor<T> out({N, C, H, W});
    const T* xp = val(x).ptr();
    const T* wp = val(w).ptr();
    const auto& bv = val(b).data;
    for (int n = 0; n < N; ++n)
      for (int c = 0; c < C; ++c) {
        const T* xc = xp + (static_cast<int64_t>(n) * C + c) * H * W;
        const T* wc = wp + static_cast<int64_t>(c) * 9;
        T* oc = out.ptr() + (static_cast<int64_t>(n) * C + c) * H * W;
        for (int yy = 0; yy < H; ++yy)
          for (int xx = 0; xx < W; ++xx) {
            T s = bv[c];
            for (int ky = 0; ky < 3; ++ky) {
              int sy = yy + ky - 1;
              if (sy < 0 || sy >= H) continue;
              for (int kx = 0; kx < 3; ++kx) {
                int sx = xx + kx - 1;
                if (sx < 0 || sx >= W) continue;
                s += wc[ky * 3 + kx] * xc[sy * W + sx];
              }
            }
            oc[yy * W + xx] = s;
          }
      }
    int y = make_node_multi(std::move(out), {x, w, b});
    attach(y, [this, y, x, w, b, N, C, H, W]() {
      const T* g = grad(y).ptr();
      const T* xp = val(x).ptr();
      const T* wp = val(w).ptr();
      for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
          const int64_t off = (static_cast<int64_t>(n) * C + c) * H * W;
          const T* gc = g + off;
          if (wants(b)) {
            T s = 0;
            for (int i = 0; i < H * W; ++i) s += gc[i];
            grad_ref(b).data[c] += s;
          }
          for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
              T wv = wp[static_cast<int64_t>(c) * 9 + ky * 3 + kx];
              T dw = 0;
              for (int yy = 0; yy < H; ++yy) {
                int sy = yy + ky - 1;
                if (sy < 0 || sy >= H) continue;
                for (int xx = 0; xx < W; ++xx) {
                  int sx = xx + kx - 1;
                  if (sx < 0 || sx >= W) continue;
                  T gv = gc[yy * W + xx];
                  dw += gv * xp[off + sy * W + sx];
                  if (wants(x)) grad_ref(x).ptr()[off + sy * W + sx] += gv * wv;
                }
              }
              if (wants(w)) grad_ref(w).data[static_cast<int64_t>(c) * 9 + ky * 3 + kx] += dw;
            }
        }
    });
    return y;
  }

  // ---- normalization ------------------------------------------------------

  // layer norm over the channel dimension at each (n,h,w)
  int layernorm_chan(int x, int gamma, int beta, T eps = T(1e-6)) {
    const auto& xs = val(x).shape;
    if (xs.size() != 4) throw std::invalid_argument("layernorm_chan: expected (N,C,H,W)");
    const int N = xs[0], C = xs[1], H = xs[2], W = xs[3], HW = H * W;
    if (val(gamma).shape != std::vector<int>{C} || val(beta).shape != std::vector<int>{C})
      throw std::invalid_argument("layernorm_chan: bad gamma/beta shape");
    Tensor<T> out({N, C, H, W});
    auto xhat = std::make_shared<std::vector<T>>(val(x).data.size());
    auto invstd = std::make_shared<std::vector<T>>(static_cast<size_t>(N) * HW);
    const T* xp = val(x).ptr();
    const auto& gv = val(gamma).data;
    const auto& bv = val(beta).data;
    for (int n = 0; n < N; ++n)
      for (int i = 0; i < HW; ++i) {
        const int64_t base = static_cast<int64_t>(n) * C * HW + i;
        T mu = 0;
        for (int c = 0; c < C; ++c) mu += xp[base + static_cast<int64_t>(c) * HW];
        mu /= C;
        T var = 0;
        for (int c = 0; c < C; ++c) {
          T d = xp[base + static_cast<int64_t>(c) * HW] - mu;
          var += d * d;
        }
        var /= C;
        T is = T(1) / std::sqrt(var + eps);
        (*invstd)[static_cast<size_t>(n) * HW + i] = is;
        for (int c = 0; c < C; ++c) {
          T xh = (xp[base + static_cast<int64_t>(c) * HW] - mu) * is;
          (*xhat)[base + static_cast<int64_t>(c) * HW] = xh;
          out.ptr()[base + static_cast<int64_t>(c) * HW] = gv[c] * xh + bv[c];
        }
      }
    int y = make_node_multi(std::move(out), {x, gamma, beta});
    attach(y, [this, y, x, gamma, beta, xhat, invstd, N, C, HW]() {
      const T* g = grad(y).ptr();
      const auto& gv = val(gamma).data;
      for (int n = 0; n < N; ++n)
        for (int i = 0; i < HW; ++i) {
          const int64_t base = static_cast<int64_t>(n) * C * HW + i;
          if (wants(gamma) || wants(beta)) {
            for (int c = 0; c < C; ++c) {
              T gy = g[base + static_cast<int64_t>(c) * HW];
              if (wants(gamma))
                grad_ref(gamma).data[c] += gy * (*xhat)[base + static_cast<int64_t>(c) * HW];
              if (wants(beta)) grad_ref(beta).data[c] += gy;
            }
          }
          if (wants(x)) {
            T mean_dxhat = 0, mean_dxhat_xhat = 0;
            for (int c = 0; c < C; ++c) {
              T dxh = g[base + static_cast<int64_t>(c) * HW] * gv[c];
              mean_dxhat += dxh;
              mean_dxhat_xhat += dxh * (*xhat)[base + static_cast<int64_t>(c) * HW];
            }
            mean_dxhat /= C;
            mean_dxhat_xhat /= C;
            T is = (*invstd)[static_cast<size_t>(n) * HW + i];
            for (int c = 0; c < C; ++c) {
              T dxh = g[base + static_cast<int64_t>(c) * HW] * gv[c];
              T xh = (*xhat)[base + static_cast<int64_t>(c) * HW];
              grad_ref(x).ptr()[base + static_cast<int64_t>(c) * HW] +=
                  is * (dxh - mean_dxhat - xh * mean_dxhat_xhat);
            }
          }
        }
    });
    return y;
  }

  // ---- token ops -----------------------------------------------------------

  // (N, C, H, W) -> (N*nW*heads, win*win, C/heads); C = heads * d
  int window_tokens(int x, int win, int heads) {
    const auto& xs = val(x).shape;
    if (xs.size() != 4) throw std::invalid_argument("window_tokens: expected (N,C,H,W)");
    const int N = xs[0], C = xs[1], H = xs[2], W = xs[3];
    if (H % win != 0 || W % win != 0)
      throw std::invalid_argument("window_tokens: window must divide spatial dims");
    if (C % heads != 0) throw std::invalid_argument("window_tokens: heads must divide channels");
    const int d = C / heads, nwy = H / win, nwx = W / win, Tk = win * win;
    Tensor<T> out({N * nwy * nwx * heads, Tk, d});
    const T* xp = val(x).ptr();
    T* op = out.ptr();
    for (int n = 0; n < N; ++n)
      for (int wy = 0; wy < nwy; ++wy)
        for (int wx = 0; wx < nwx; ++wx)
          for (int h = 0; h < heads; ++h) {
            int64_t bo = ((((static_cast<int64_t>(n) * nwy + wy) * nwx + wx) * heads + h)) * Tk * d;
            for (int ty = 0; ty < win; ++ty)
              for (int tx = 0; tx < win; ++tx)
                for (int dd = 0; dd < d; ++dd)
                  op[bo + (ty * win + tx) * d + dd] =
                      xp[((static_cast<int64_t>(n) * C + h * d + dd) * H + wy * win + ty) * W +
                         wx * win + tx];
          }
    int y = make_from(std::move(out), {x});
    attach(y, [this, y, x, N, C, H, W, win, heads]() {
      if (!wants(x)) return;
      const int d = C / heads, nwy = H / win, nwx = W / win, Tk = win * win;
      const T* g = grad(y).ptr();
      T* gx = grad_ref(x).ptr();
      for (int n = 0; n < N; ++n)
        for (int wy = 0; wy < nwy; ++wy)
          for (int wx = 0; wx < nwx; ++wx)
            for (int h = 0; h < heads; ++h) {
              int64_t bo = ((((static_cast<int64_t>(n) * nwy + wy) * nwx + wx) * heads + h)) * Tk * d;
              for (int ty = 0; ty < win; ++ty)
                for (int tx = 0; tx < win; ++tx)
                  for (int dd = 0; dd < d; ++dd)
                    gx[((static_cast<int64_t>(n) * C + h * d + dd) * H + wy * win + ty) * W +
                       wx * win + tx] += g[bo + (ty * win + tx) * d + dd];
            }
    });
    return y;
  }

  // inverse of window_tokens
  int window_untokens(int tok, int N, int C, int H, int W, int win, int heads) {
    const int d = C / heads, nwy = H / win, nwx = W / win, Tk = win * win;
    if (val(tok).shape != std::vector<int>{N * nwy * nwx * heads, Tk, d})
      throw std::invalid_argument("window_untokens: token shape mismatch");
    Tensor<T> out({N, C, H, W});
    const T* tp = val(tok).ptr();
    T* op = out.ptr();
    for (int n = 0; n < N; ++n)
      for (int wy = 0; wy < nwy; ++wy)
        for (int wx = 0; wx < nwx; ++wx)
          for (int h = 0; h < heads; ++h) {
            int64_t bo = ((((static_cast<int64_t>(n) * nwy + wy) * nwx + wx) * heads + h)) * Tk * d;
            for (int ty = 0; ty < win; ++ty)
              for (int tx = 0; tx < win; ++tx)
                for (int dd = 0; dd < d; ++dd)
                  op[((static_cast<int64_t>(n) * C + h * d + dd) * H + wy * win + ty) * W +
                     wx * win + tx] = tp[bo + (ty * win + tx) * d + dd];
          }
    int y = make_from(std::move(out), {tok});
    attach(y, [this, y, tok, N, C, H, W, win, heads]() {
      if (!wants(tok)) return;
      const int d = C / heads, nwy = H / win, nwx = W / win, Tk = win * win;
      const T* g = grad(y).ptr();
      T* gt = grad_ref(tok).ptr();
      for (int n = 0; n < N; ++n)
        for (int wy = 0; wy < nwy; ++wy)
          for (int wx = 0; wx < nwx; ++wx)
            for (int h = 0; h < heads; ++h) {
              int64_t bo = ((((static_cast<int64_t>(n) * nwy + wy) * nwx + wx) * heads + h)) * Tk * d;
              for (int ty = 0; ty < win; ++ty)
                for (int tx = 0; tx < win; ++tx)
                  for (int dd = 0; dd < d; ++dd)
                    gt[bo + (ty * win + tx) * d + dd] +=
                        g[((static_cast<int64_t>(n) * C + h * d + dd) * H + wy * win + ty) * W +
                          wx * win + tx];
            }
    });
    return y;
  }

  // batched matmul: out_b = op(a_b) * op(b_b)
  int bmm(int a, int b, bool ta, bool tb) {
    const auto& as = val(a).shape;
    const auto& bs = val(b).shape;
    if (as.size() != 3 || bs.size() != 3 || as[0] != bs[0])
      throw std::invalid_argument("bmm: expected matching 3-d batches");
    const int B = as[0];
    const int M = ta ? as[2] : as[1];
    const int Ka = ta ? as[1] : as[2];
    const int Kb = tb ? bs[2] : bs[1];
    const int Nn = tb ? bs[1] : bs[2];
    if (Ka != Kb) throw std::invalid_argument("bmm: inner dimensions disagree");
    Tensor<T> out({B, M, Nn});
    for (int i = 0; i < B; ++i) {
      MapC am(val(a).ptr() + static_cast<int64_t>(i) * as[1] * as[2], as[1], as[2]);
      MapC bm(val(b).ptr() + static_cast<int64_t>(i) * bs[1] * bs[2], bs[1], bs[2]);
      MapM om(out.ptr() + static_cast<int64_t>(i) * M * Nn, M, Nn);
      if (!ta && !tb) om.noalias() = am * bm;
      else if (!ta && tb) om.noalias() = am * bm.transpose();
      else if (ta && !tb) om.noalias() = am.transpose() * bm;
      else om.noalias() = am.transpose() * bm.transpose();
    }
    return unary_or_binary(std::move(out), a, b, [this, B, M, Nn, ta, tb](int y, int pa, int pb) {
      const auto& as = val(pa).shape;
      const auto& bs = val(pb).shape;
      for (int i = 0; i < B; ++i) {
        MapC gm(grad(y).ptr() + static_cast<int64_t>(i) * M * Nn, M, Nn);
        MapC am(val(pa).ptr() + static_cast<int64_t>(i) * as[1] * as[2], as[1], as[2]);
        MapC bm(val(pb).ptr() + static_cast<int64_t>(i) * bs[1] * bs[2], bs[1], bs[2]);
        if (wants(pa)) {
          MapM ga(grad_ref(pa).ptr() + static_cast<int64_t>(i) * as[1] * as[2], as[1], as[2]);
          if (!ta && !tb) ga.noalias() += gm * bm.transpose();
          else if (!ta && tb) ga.noalias() += gm * bm;
          else if (ta && !tb) ga.noalias() += bm * gm.transpose();
          else ga.noalias() += bm.transpose() * gm.transpose();
        }
        if (wants(pb)) {
          MapM gb(grad_ref(pb).ptr() + static_cast<int64_t>(i) * bs[1] * bs[2], bs[1], bs[2]);
          if (!ta && !tb) gb.noalias() += am.transpose() * gm;
          else if (!ta && tb) gb.noalias() += gm.transpose() * am;
          else if (ta && !tb) gb.noalias() += am * gm;
          else gb.noalias() += gm.transpose() * am.transpose();
        }
      }
    });
  }

  // softmax over the last dimension
  int softmax_rows(int x) {
    const auto& xs = val(x).shape;
    if (xs.empty()) throw std::invalid_argument("softmax_rows: rank 0");
    const int C = xs.back();
    const int64_t R = val(x).numel() / C;
    Tensor<T> out = val(x);
    for (int64_t r = 0; r < R; ++r) {
      T* p = out.ptr() + r * C;
      T mx = p[0];
      for (int i = 1; i < C; ++i) mx = std::max(mx, p[i]);
      T s = 0;
      for (int i = 0; i < C; ++i) {
        p[i] = std::exp(p[i] - mx);
        s += p[i];
      }
      for (int i = 0; i < C; ++i) p[i] /= s;
    }
    int y = make_from(std::move(out), {x});
    attach(y, [this, y, x, C, R]() {
      if (!wants(x)) return;
      const T* yv = val(y).ptr();
      const T* g = grad(y).ptr();
      T* gx = grad_ref(x).ptr();
      for (int64_t r = 0; r < R; ++r) {
        const T* yr = yv + r * C;
        const T* gr = g + r * C;
        T dot = 0;
        for (int i = 0; i < C; ++i) dot += yr[i] * gr[i];
        for (int i = 0; i < C; ++i) gx[r * C + i] += yr[i] * (gr[i] - dot);
      }
    });
    return y;
  }

  // rows (last dim) scaled to unit L2 norm; eps inside the sqrt
  int l2norm_rows(int x, T eps = T(1e-12)) {
    const auto& xs = val(x).shape;
    const int C = xs.back();
    const int64_t R = val(x).numel() / C;
    Tensor<T> out = val(x);
    auto norms = std::make_shared<std::vector<T>>(R);
    for (int64_t r = 0; r < R; ++r) {
      T* p = out.ptr() + r * C;
      T s = 0;
      for (int i = 0; i < C; ++i) s += p[i] * p[i];
      T n = std::sqrt(s + eps);
      (*norms)[r] = n;
      for (int i = 0; i < C; ++i) p[i] /= n;
    }
    int y = make_from(std::move(out), {x});
    attach(y, [this, y, x, C, R, norms]() {
      if (!wants(x)) return;
      const T* xv = val(x).ptr();
      const T* g = grad(y).ptr();
      T* gx = grad_ref(x).ptr();
      for (int64_t r = 0; r < R; ++r) {
        T n = (*norms)[r];
        T dot = 0;
        for (int i = 0; i < C; ++i) dot += xv[r * C + i] * g[r * C + i];
        for (int i = 0; i < C; ++i)
          gx[r * C + i] += g[r * C + i] / n - xv[r * C + i] * dot / (n * n * n);
      }
    });
    return y;
  }

  // x (B,R,C); batch slice b scaled by tau[b % groups]
  int scale_rowgroups(int x, int tau, int groups) {
    const auto& xs = val(x).shape;
    if (xs.size() != 3 || val(tau).shape != std::vector<int>{groups})
      throw std::invalid_argument("scale_rowgroups: bad shapes");
    const int B = xs[0];
    const int64_t S = static_cast<int64_t>(xs[1]) * xs[2];
    Tensor<T> out = val(x);
    const auto& tv = val(tau).data;
    for (int b = 0; b < B; ++b) {
      T t = tv[b % groups];
      T* p = out.ptr() + static_cast<int64_t>(b) * S;
      for (int64_t i = 0; i < S; ++i) p[i] *= t;
    }
    return unary_or_binary(std::move(out), x, tau, [this, B, S, groups](int y, int px, int ptau) {
      const T* g = grad(y).ptr();
      const auto& tv = val(ptau).data;
      const T* xv = val(px).ptr();
      for (int b = 0; b < B; ++b) {
        const int64_t off = static_cast<int64_t>(b) * S;
        if (wants(px)) {
          T t = tv[b % groups];
          T* gx = grad_ref(px).ptr();
          for (int64_t i = 0; i < S; ++i) gx[off + i] += g[off + i] * t;
        }
        if (wants(ptau)) {
          T s = 0;
          for (int64_t i = 0; i < S; ++i) s += g[off + i] * xv[off + i];
          grad_ref(ptau).data[b % groups] += s;
        }
      }
    });
  }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    std::function<void()> back;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;

  int make_node(Tensor<T> v, bool rg, std::function<void()> back) {
    nodes_.push_back(Node{std::move(v), {}, std::move(back), rg});
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool wants(int id) const { return nodes_[id].requires_grad; }

  Tensor<T>& grad_ref(int id) {
    auto& n = nodes_[id];
    if (n.grad.data.empty()) n.grad = Tensor<T>(n.value.shape, T(0));
    return n.grad;
  }

  void accumulate(int id, const std::vector<T>& g) {
    if (!wants(id)) return;
    auto& dst = grad_ref(id).data;
    for (size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }

  void accumulate_neg(int id, const std::vector<T>& g) {
    if (!wants(id)) return;
    auto& dst = grad_ref(id).data;
    for (size_t i = 0; i < g.size(); ++i) dst[i] -= g[i];
  }

  int make_from(Tensor<T> v, std::initializer_list<int> parents) {
    bool rg = false;
    for (int p : parents) rg = rg || nodes_[p].requires_grad;
    return make_node(std::move(v), rg && grad_enabled, nullptr);
  }

  int make_node_multi(Tensor<T> v, std::initializer_list<int> parents) {
    return make_from(std::move(v), parents);
  }

  void attach(int y, std::function<void()> back) {
    if (grad_enabled && nodes_[y].requires_grad) nodes_[y].back = std::move(back);
  }

  // helper for binary ops: builds node and binds (y, a, b) into the closure
  int unary_or_binary(Tensor<T> v, int a, int b, std::function<void(int, int, int)> back) {
    int y = make_from(std::move(v), {a, b});
    if (grad_enabled && nodes_[y].requires_grad)
      nodes_[y].back = [this, y, a, b, back = std::move(back)]() { back(y, a, b); };
    return y;
  }

  void check_same(int a, int b, const char* ctx) {
    if (!val(a).same_shape(val(b)))
      throw std::invalid_argument(std::string(ctx) + ": shape mismatch " +
                                  shape_str(val(a).shape) + " vs " + shape_str(val(b).shape));
  }

  static void im2col(const T* x, int Cin, int H, int W, int kh, int kw, int stride, int pad,
                     int Ho, int Wo, T* col) {
    for (int c = 0; c < Cin; ++c)
      for (int ky = 0; ky < kh; ++ky)
        for (int kx = 0; kx < kw; ++kx) {
          T* dst = col + ((static_cast<int64_t>(c) * kh + ky) * kw + kx) * Ho * Wo;
          for (int oy = 0; oy < Ho; ++oy) {
            int sy = oy * stride + ky - pad;
            if (sy < 0 || sy >= H) {
              for (int ox = 0; ox < Wo; ++ox) dst[oy * Wo + ox] = T(0);
              continue;
            }
            for (int ox = 0; ox < Wo; ++ox) {
              int sx = ox * stride + kx - pad;
              dst[oy * Wo + ox] =
                  (sx < 0 || sx >= W) ? T(0) : x[(static_cast<int64_t>(c) * H + sy) * W + sx];
            }
          }
        }
  }

  static void col2im_add(const T* col, int Cin, int H, int W, int kh, int kw, int stride, int pad,
                         int Ho, int Wo, T* x) {
    for (int c = 0; c < Cin; ++c)
      for (int ky = 0; ky < kh; ++ky)
        for (int kx = 0; kx < kw; ++kx) {
          const T* src = col + ((static_cast<int64_t>(c) * kh + ky) * kw + kx) * Ho * Wo;
          for (int oy = 0; oy < Ho; ++oy) {
            int sy = oy * stride + ky - pad;
            if (sy < 0 || sy >= H) continue;
            for (int ox = 0; ox < Wo; ++ox) {
              int sx = ox * stride + kx - pad;
              if (sx < 0 || sx >= W) continue;
              x[(static_cast<int64_t>(c) * H + sy) * W + sx] += src[oy * Wo + ox];
            }
          }
        }
  }
};

}  // namespace vpip::nn
