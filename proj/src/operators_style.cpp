#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "vpip/operators.hpp"

namespace vpip {

namespace detail {
int reflect(int i, int n);
Image conv_separable(const Image& img, const std::vector<double>& kernel);
Image blur_by_sigma(const Image& img, double sigma);
}  // namespace detail

ToneKind tone_kind_from_name(const std::string& name) {
  if (name == "brightness") return ToneKind::brightness;
  if (name == "contrast") return ToneKind::contrast;
  if (name == "saturation") return ToneKind::saturation;
  if (name == "gamma") return ToneKind::gamma;
  throw std::invalid_argument("adjust_tone: unknown kind '" + name + "'");
}

Image adjust_tone(const Image& img, ToneKind kind, double factor) {
  if (factor <= 0.0) throw std::invalid_argument("adjust_tone: factor must be > 0");
  Image out = img;
  switch (kind) {
    case ToneKind::brightness:
      for (double& v : out.data) v = std::min(1.0, std::max(0.0, v * factor));
      break;
    case ToneKind::contrast:
      for (double& v : out.data) v = std::min(1.0, std::max(0.0, (v - 0.5) * factor + 0.5));
      break;
    case ToneKind::saturation: {
      if (img.channels != 3) return img;
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
          double l = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
          for (int c = 0; c < 3; ++c) {
            double v = l + (img.at(y, x, c) - l) * factor;
            out.at(y, x, c) = std::min(1.0, std::max(0.0, v));
          }
        }
      break;
    }
    case ToneKind::gamma:
      for (double& v : out.data) v = std::pow(std::min(1.0, std::max(0.0, v)), factor);
      break;
  }
  return out;
}

Image hist_equalize(const Image& img) {
  Image out = img;
  const long n = static_cast<long>(img.height) * img.width;
  for (int c = 0; c < img.channels; ++c) {
    std::array<long, 256> hist{};
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        int bin = static_cast<int>(std::lround(img.at(y, x, c) * 255.0));
        hist[std::min(255, std::max(0, bin))]++;
      }
    std::array<double, 256> cdf{};
    long acc = 0;
    for (int b = 0; b < 256; ++b) {
      acc += hist[b];
      cdf[b] = static_cast<double>(acc) / n;
    }
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        int bin = static_cast<int>(std::lround(img.at(y, x, c) * 255.0));
        out.at(y, x, c) = cdf[std::min(255, std::max(0, bin))];
      }
  }
  return out;
}

Image stylize_pencil(const Image& img, double blur_sigma) {
  if (blur_sigma <= 0.0) throw std::invalid_argument("stylize_pencil: blur_sigma must be > 0");
  const double eps = 1e-6;
  Image g = luma(img);
  Image inv(g.height, g.width, 1);
  for (size_t i = 0; i < g.data.size(); ++i) inv.data[i] = 1.0 - g.data[i];
  Image blurred = detail::blur_by_sigma(inv, blur_sigma);
  Image sketch(g.height, g.width, 1);
  for (size_t i = 0; i < g.data.size(); ++i) {
    double denom = std::max(eps, 1.0 - blurred.data[i]);
    sketch.data[i] = std::min(1.0, g.data[i] / denom);  // color dodge
  }
  return replicate3(sketch);
}

namespace {

Image median3x3(const Image& img) {
  Image out(img.height, img.width, img.channels);
  std::array<double, 9> window;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        int idx = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            window[idx++] =
                img.at(detail::reflect(y + dy, img.height), detail::reflect(x + dx, img.width), c);
        std::nth_element(window.begin(), window.begin() + 4, window.end());
        out.at(y, x, c) = window[4];
      }
  return out;
}

Image laplacian_response(const Image& gray) {
  Image out(gray.height, gray.width, 1);
  for (int y = 0; y < gray.height; ++y)
    for (int x = 0; x < gray.width; ++x) {
      double up = gray.at(detail::reflect(y - 1, gray.height), x, 0);
      double dn = gray.at(detail::reflect(y + 1, gray.height), x, 0);
      double lf = gray.at(y, detail::reflect(x - 1, gray.width), 0);
      double rt = gray.at(y, detail::reflect(x + 1, gray.width), 0);
      out.at(y, x, 0) = up + dn + lf + rt - 4.0 * gray.at(y, x, 0);
    }
  return out;
}

}  // namespace

Image stylize_cartoon(const Image& img, int levels, int smooth_iters) {
  if (levels < 2) throw std::invalid_argument("stylize_cartoon: levels must be >= 2");
  if (smooth_iters < 0) throw std::invalid_argument("stylize_cartoon: smooth_iters must be >= 0");
  Image s = img;
  for (int i = 0; i < smooth_iters; ++i) s = median3x3(s);
  Image q = s;
  for (double& v : q.data) {
    double k = std::floor(v * levels);
    k = std::min(static_cast<double>(levels - 1), std::max(0.0, k));
    v = k / (levels - 1);
  }
  Image lap = laplacian_response(luma(q));
  Image out = q;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double e = std::min(1.0, 3.0 * std::abs(lap.at(y, x, 0)));
      for (int c = 0; c < img.channels; ++c) out.at(y, x, c) *= (1.0 - e);
    }
  return out;
}

Image edge_laplacian(const Image& img) {
  Image lap = laplacian_response(luma(img));
  for (double& v : lap.data) v = std::min(1.0, std::abs(v));
  return replicate3(lap);
}

Image edge_canny(const Image& img, double low, double high) {
  if (!(low >= 0.0 && low < high && high <= 1.0))
    throw std::invalid_argument("edge_canny: need 0 <= low < high <= 1");
  const int H = img.height, W = img.width;
  Image g = detail::blur_by_sigma(luma(img), 1.0);

  std::vector<double> gx(static_cast<size_t>(H) * W), gy(gx.size()), mag(gx.size());
  auto at = [&](int y, int x) { return g.at(detail::reflect(y, H), detail::reflect(x, W), 0); };
  double max_mag = 0.0;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double sx = -at(y - 1, x - 1) + at(y - 1, x + 1) - 2 * at(y, x - 1) + 2 * at(y, x + 1) -
                  at(y + 1, x - 1) + at(y + 1, x + 1);
      double sy = -at(y - 1, x - 1) - 2 * at(y - 1, x) - at(y - 1, x + 1) + at(y + 1, x - 1) +
                  2 * at(y + 1, x) + at(y + 1, x + 1);
      size_t i = static_cast<size_t>(y) * W + x;
      gx[i] = sx;
      gy[i] = sy;
      mag[i] = std::hypot(sx, sy);
      max_mag = std::max(max_mag, mag[i]);
    }
  if (max_mag > 0.0)
    for (double& m : mag) m /= max_mag;

  // non-maximum suppression along the quantized gradient direction; ties
  // resolved toward the positive direction so a symmetric edge keeps width 1
  std::vector<uint8_t> state(mag.size(), 0);  // 0 none, 1 weak, 2 strong
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      size_t i = static_cast<size_t>(y) * W + x;
      if (mag[i] < low) continue;
      double ang = std::atan2(gy[i], gx[i]);
      if (ang < 0) ang += M_PI;
      int dx1, dy1;
      if (ang < M_PI / 8 || ang >= 7 * M_PI / 8) {
        dx1 = 1; dy1 = 0;
      } else if (ang < 3 * M_PI / 8) {
        dx1 = 1; dy1 = 1;
      } else if (ang < 5 * M_PI / 8) {
        dx1 = 0; dy1 = 1;
      } else {
        dx1 = -1; dy1 = 1;
      }
      auto m_at = [&](int yy, int xx) {
        if (yy < 0 || yy >= H || xx < 0 || xx >= W) return 0.0;
        return mag[static_cast<size_t>(yy) * W + xx];
      };
      if (mag[i] > m_at(y + dy1, x + dx1) && mag[i] >= m_at(y - dy1, x - dx1))
        state[i] = mag[i] >= high ? 2 : 1;
    }

  // hysteresis: grow strong edges through weak neighbors
  Image out(H, W, 1, 0.0);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      if (state[static_cast<size_t>(y) * W + x] == 2) {
        out.at(y, x, 0) = 1.0;
        queue.emplace_back(y, x);
      }
  while (!queue.empty()) {
    auto [y, x] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int yy = y + dy, xx = x + dx;
        if (yy < 0 || yy >= H || xx < 0 || xx >= W) continue;
        size_t j = static_cast<size_t>(yy) * W + xx;
        if (state[j] == 1 && out.at(yy, xx, 0) == 0.0) {
          out.at(yy, xx, 0) = 1.0;
          queue.emplace_back(yy, xx);
        }
      }
  }
  return replicate3(out);
}

}  // namespace vpip
