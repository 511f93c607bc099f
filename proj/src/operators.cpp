#include "vpip/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vpip/rng.hpp"

namespace vpip {

namespace detail {

// symmetric (edge-repeating) reflection; preserves total mass for
// normalized symmetric kernels
int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

Image conv_separable(const Image& img, const std::vector<double>& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int c0 = k / 2;
  Image tmp(img.height, img.width, img.channels);
  // horizontal
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += kernel[j] * img.at(y, reflect(x + j - c0, img.width), c);
        tmp.at(y, x, c) = s;
      }
  Image out(img.height, img.width, img.channels);
  // vertical
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += kernel[j] * tmp.at(reflect(y + j - c0, img.height), x, c);
        out.at(y, x, c) = s;
      }
  return out;
}

Image blur_by_sigma(const Image& img, double sigma) {
  if (sigma <= 0.0) return img;
  int k = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
  return conv_separable(img, gaussian_kernel(sigma, k));
}

}  // namespace detail

std::vector<double> gaussian_kernel(double sigma, int ksize) {
  if (ksize < 1 || ksize % 2 == 0) throw std::invalid_argument("gaussian_kernel: ksize must be odd and >= 1");
  std::vector<double> k(ksize, 0.0);
  int c = ksize / 2;
  if (sigma <= 0.0) {
    k[c] = 1.0;
    return k;
  }
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    double d = i - c;
    k[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

Image apply_gaussian_noise(const Image& img, double sigma, uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("apply_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return img;
  Rng rng(hash_combine(seed, fnv1a("gaussian_noise")));
  Image out = img;
  for (double& v : out.data) v = std::min(1.0, std::max(0.0, v + sigma * rng.normal()));
  return out;
}

Image apply_poisson_noise(const Image& img, double peak, uint64_t seed) {
  if (peak <= 0.0) throw std::invalid_argument("apply_poisson_noise: peak must be > 0");
  Rng rng(hash_combine(seed, fnv1a("poisson_noise")));
  Image out = img;
  for (double& v : out.data) {
    double lam = std::max(0.0, v) * peak;
    v = std::min(1.0, std::max(0.0, static_cast<double>(rng.poisson(lam)) / peak));
  }
  return out;
}

Image apply_salt_pepper(const Image& img, double p, uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("apply_salt_pepper: p must be in [0,1]");
  Rng rng(hash_combine(seed, fnv1a("salt_pepper")));
  Image out = img;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double u = rng.uniform();
      if (u < p) {
        double v = rng.uniform() < 0.5 ? 0.0 : 1.0;
        for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = v;
      }
    }
  return out;
}

Image apply_gaussian_blur(const Image& img, double sigma, int ksize) {
  if (sigma < 0.0) throw std::invalid_argument("apply_gaussian_blur: sigma must be >= 0");
  if (ksize < 1 || ksize % 2 == 0)
    throw std::invalid_argument("apply_gaussian_blur: ksize must be odd and >= 1");
  if (ksize == 1 || sigma == 0.0) return img;
  Image out = detail::conv_separable(img, gaussian_kernel(sigma, ksize));
  clamp01(out);
  return out;
}

Image apply_rl_artifact(const Image& img, double psf_sigma, int iters) {
  if (iters < 1) throw std::invalid_argument("apply_rl_artifact: iters must be >= 1");
  if (psf_sigma <= 0.0) throw std::invalid_argument("apply_rl_artifact: psf_sigma must be > 0");
  const double eps = 1e-6;
  Image observed = detail::blur_by_sigma(img, psf_sigma);
  Image x = observed;
  Image ratio(img.height, img.width, img.channels);
  for (int it = 0; it < iters; ++it) {
    Image denom = detail::blur_by_sigma(x, psf_sigma);
    for (size_t i = 0; i < ratio.data.size(); ++i)
      ratio.data[i] = observed.data[i] / std::max(denom.data[i], eps);
    Image corr = detail::blur_by_sigma(ratio, psf_sigma);  // Gaussian PSF is symmetric
    for (size_t i = 0; i < x.data.size(); ++i) x.data[i] *= corr.data[i];
  }
  clamp01(x);
  return x;
}

Image apply_pixelation(const Image& img, int factor) {
  if (factor < 2) throw std::invalid_argument("apply_pixelation: factor must be >= 2");
  Image out = img;
  for (int by = 0; by < img.height; by += factor)
    for (int bx = 0; bx < img.width; bx += factor) {
      int bh = std::min(factor, img.height - by);
      int bw = std::min(factor, img.width - bx);
      for (int c = 0; c < img.channels; ++c) {
        double first = img.at(by, bx, c);
        bool uniform = true;
        double sum = 0.0;
        for (int y = 0; y < bh; ++y)
          for (int x = 0; x < bw; ++x) {
            double v = img.at(by + y, bx + x, c);
            uniform = uniform && (v == first);
            sum += v;
          }
        double m = uniform ? first : sum / (bh * bw);
        for (int y = 0; y < bh; ++y)
          for (int x = 0; x < bw; ++x) out.at(by + y, bx + x, c) = m;
      }
    }
  return out;
}

std::pair<Image, Image> apply_inpaint_mask(const Image& img, double coverage, uint64_t seed) {
  if (coverage <= 0.0 || coverage >= 0.5)
    throw std::invalid_argument("apply_inpaint_mask: coverage must be in (0, 0.5)");
  Rng rng(hash_combine(seed, fnv1a("inpaint")));
  const int H = img.height, W = img.width;
  const long total = static_cast<long>(H) * W;
  long target = std::max(1L, std::lround(coverage * total));

  Image mask(H, W, 1, 0.0);
  long count = 0;
  auto mark = [&](int y, int x) {
    if (mask.at(y, x, 0) == 0.0) {
      mask.at(y, x, 0) = 1.0;
      ++count;
    }
  };

  // a few rectangles when the budget allows, never exceeding half of it
  while (target >= 200 && count < target / 2) {
    int rw = rng.uniform_int(W / 16 + 1, std::max(W / 16 + 2, W / 5));
    int rh = rng.uniform_int(H / 16 + 1, std::max(H / 16 + 2, H / 5));
    if (count + static_cast<long>(rw) * rh > target / 2) break;
    int x0 = rng.uniform_int(0, W - rw);
    int y0 = rng.uniform_int(0, H - rh);
    for (int y = y0; y < y0 + rh; ++y)
      for (int x = x0; x < x0 + rw; ++x) mark(y, x);
  }

  // random-walk strokes fill the remainder pixel-exactly
  int y = rng.uniform_int(0, H - 1), x = rng.uniform_int(0, W - 1);
  int steps_in_walk = 0;
  while (count < target) {
    mark(y, x);
    static const int dy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static const int dx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
    int d = rng.uniform_int(0, 7);
    y = std::min(H - 1, std::max(0, y + dy[d]));
    x = std::min(W - 1, std::max(0, x + dx[d]));
    if (++steps_in_walk > 120) {
      y = rng.uniform_int(0, H - 1);
      x = rng.uniform_int(0, W - 1);
      steps_in_walk = 0;
    }
  }

  Image out = img;
  for (int yy = 0; yy < H; ++yy)
    for (int xx = 0; xx < W; ++xx)
      if (mask.at(yy, xx, 0) == 1.0)
        for (int c = 0; c < img.channels; ++c) out.at(yy, xx, c) = 0.5;
  return {out, mask};
}

Image apply_rain_streaks(const Image& img, double density, double angle_deg, uint64_t seed) {
  if (density <= 0.0) throw std::invalid_argument("apply_rain_streaks: density must be > 0");
  if (angle_deg < -45.0 || angle_deg > 45.0)
    throw std::invalid_argument("apply_rain_streaks: angle must be in [-45, 45]");
  Rng rng(hash_combine(seed, fnv1a("rain")));
  const int H = img.height, W = img.width;
  const double a = angle_deg * M_PI / 180.0;
  const double dx = std::sin(a), dy = std::cos(a);  // 0 degrees falls straight down

  Image streaks(H, W, 1, 0.0);
  long n = std::lround(density * (static_cast<double>(H) * W) / 1000.0);
  for (long i = 0; i < n; ++i) {
    double cx = rng.uniform(0.0, W - 1.0);
    double cy = rng.uniform(0.0, H - 1.0);
    double len = rng.uniform(0.08, 0.25) * std::min(H, W) + 3.0;
    double alpha = rng.uniform(0.08, 0.3);
    for (double t = -len / 2; t <= len / 2; t += 1.0) {
      int px = static_cast<int>(std::lround(cx + t * dx));
      int py = static_cast<int>(std::lround(cy + t * dy));
      if (px >= 0 && px < W && py >= 0 && py < H)
        streaks.at(py, px, 0) = std::max(streaks.at(py, px, 0), alpha);
    }
  }
  // 1-pixel motion blur along the streak direction (streak layer only, so
  // the additive contribution stays nonnegative)
  int ox = static_cast<int>(std::lround(dx)), oy = static_cast<int>(std::lround(dy));
  Image blurred(H, W, 1, 0.0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double s = streaks.at(y, x, 0);
      s += streaks.at(detail::reflect(y - oy, H), detail::reflect(x - ox, W), 0);
      s += streaks.at(detail::reflect(y + oy, H), detail::reflect(x + ox, W), 0);
      blurred.at(y, x, 0) = s / 3.0;
    }
  Image out = img;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(y, x, c) = std::min(1.0, out.at(y, x, c) + blurred.at(y, x, 0));
  return out;
}

}  // namespace vpip
