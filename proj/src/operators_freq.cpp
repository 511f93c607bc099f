#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "vpip/operators.hpp"

namespace vpip {

namespace {

// ITU-T T.81 Annex K quantization tables
const int kLumaQuant[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

const int kChromaQuant[64] = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

void scaled_table(const int* base, int quality, double* out) {
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  for (int i = 0; i < 64; ++i) {
    int q = (base[i] * scale + 50) / 100;
    out[i] = static_cast<double>(std::min(255, std::max(1, q)));
  }
}

// orthonormal 8x8 DCT-II basis
struct DctBasis {
  double c[8][8];
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) c[u][x] = alpha * std::cos((2 * x + 1) * u * M_PI / 16.0);
    }
  }
};

void dct8_forward(const DctBasis& B, const double in[8][8], double out[8][8]) {
  double tmp[8][8];
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int y = 0; y < 8; ++y) s += B.c[u][y] * in[y][x];
      tmp[u][x] = s;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int x = 0; x < 8; ++x) s += B.c[v][x] * tmp[u][x];
      out[u][v] = s;
    }
}

void dct8_inverse(const DctBasis& B, const double in[8][8], double out[8][8]) {
  double tmp[8][8];
  for (int y = 0; y < 8; ++y)
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int u = 0; u < 8; ++u) s += B.c[u][y] * in[u][v];
      tmp[y][v] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int v = 0; v < 8; ++v) s += B.c[v][x] * tmp[y][v];
      out[y][x] = s;
    }
}

void codec_channel(std::vector<double>& plane, int H, int W, const double* quant) {
  static const DctBasis B;
  for (int by = 0; by < H; by += 8)
    for (int bx = 0; bx < W; bx += 8) {
      double blk[8][8], coef[8][8];
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) blk[y][x] = plane[(by + y) * W + (bx + x)];
      dct8_forward(B, blk, coef);
      for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
          double q = quant[u * 8 + v];
          coef[u][v] = std::round(coef[u][v] / q) * q;
        }
      dct8_inverse(B, coef, blk);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) plane[(by + y) * W + (bx + x)] = blk[y][x];
    }
}

}  // namespace

Image apply_jpeg_like(const Image& img, int quality) {
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("apply_jpeg_like: quality must be in [1,100]");
  const int H = img.height, W = img.width;
  const int Hp = (H + 7) / 8 * 8, Wp = (W + 7) / 8 * 8;

  double lumaq[64], chromaq[64];
  scaled_table(kLumaQuant, quality, lumaq);
  scaled_table(kChromaQuant, quality, chromaq);

  // to YCbCr planes, level-shifted to [-128, 127], edge-replicated padding
  int planes = img.channels == 3 ? 3 : 1;
  std::vector<std::vector<double>> ycc(planes, std::vector<double>(static_cast<size_t>(Hp) * Wp));
  for (int y = 0; y < Hp; ++y)
    for (int x = 0; x < Wp; ++x) {
      int sy = std::min(y, H - 1), sx = std::min(x, W - 1);
      if (planes == 3) {
        double r = img.at(sy, sx, 0) * 255.0, g = img.at(sy, sx, 1) * 255.0,
               b = img.at(sy, sx, 2) * 255.0;
        ycc[0][y * Wp + x] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
        ycc[1][y * Wp + x] = -0.168736 * r - 0.331264 * g + 0.5 * b;
        ycc[2][y * Wp + x] = 0.5 * r - 0.418688 * g - 0.081312 * b;
      } else {
        ycc[0][y * Wp + x] = img.at(sy, sx, 0) * 255.0 - 128.0;
      }
    }

  for (int p = 0; p < planes; ++p) codec_channel(ycc[p], Hp, Wp, p == 0 ? lumaq : chromaq);

  Image out(H, W, img.channels);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      if (planes == 3) {
        double Y = ycc[0][y * Wp + x] + 128.0, Cb = ycc[1][y * Wp + x], Cr = ycc[2][y * Wp + x];
        out.at(y, x, 0) = (Y + 1.402 * Cr) / 255.0;
        out.at(y, x, 1) = (Y - 0.344136 * Cb - 0.714136 * Cr) / 255.0;
        out.at(y, x, 2) = (Y + 1.772 * Cb) / 255.0;
      } else {
        out.at(y, x, 0) = (ycc[0][y * Wp + x] + 128.0) / 255.0;
      }
    }
  clamp01(out);
  return out;
}

Image apply_ringing(const Image& img, double cutoff) {
  if (cutoff <= 0.0 || cutoff > 1.0)
    throw std::invalid_argument("apply_ringing: cutoff must be in (0,1]");
  using Mat = Eigen::MatrixXcd;
  const int H = img.height, W = img.width;

  auto dft_matrix = [](int n, bool inverse) {
    Mat F(n, n);
    double s = 1.0 / std::sqrt(static_cast<double>(n));
    double sign = inverse ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double ang = sign * 2.0 * M_PI * j * k / n;
        F(j, k) = std::complex<double>(std::cos(ang), std::sin(ang)) * s;
      }
    return F;
  };
  Mat Fh = dft_matrix(H, false), Fw = dft_matrix(W, false);
  Mat Gh = dft_matrix(H, true), Gw = dft_matrix(W, true);

  // per-axis normalized frequency; max-norm keeps cutoff=1 an exact no-op
  auto norm_freq = [](int k, int n) {
    int f = k <= n / 2 ? k : k - n;
    return std::abs(static_cast<double>(f)) / (n / 2.0);
  };

  Image out(H, W, img.channels);
  Mat X(H, W);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) X(y, x) = img.at(y, x, c);
    Mat spec = Fh * X * Fw.transpose();
    for (int fy = 0; fy < H; ++fy)
      for (int fx = 0; fx < W; ++fx)
        if (std::max(norm_freq(fy, H), norm_freq(fx, W)) > cutoff) spec(fy, fx) = 0.0;
    Mat back = Gh * spec * Gw.transpose();
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) out.at(y, x, c) = back(y, x).real();
  }
  clamp01(out);
  return out;
}

}  // namespace vpip
