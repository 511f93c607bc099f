#include "vpip/image.hpp"

#include <algorithm>
#include <cmath>

namespace vpip {

void clamp01(Image& img) {
  for (double& v : img.data) v = std::min(1.0, std::max(0.0, v));
}

bool image_valid(const Image& img, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (img.channels != 1 && img.channels != 3) return fail("channels must be 1 or 3");
  if (img.height < 8 || img.width < 8) return fail("height and width must be >= 8");
  if (img.data.size() != static_cast<size_t>(img.height) * img.width * img.channels)
    return fail("data size does not match shape");
  for (double v : img.data) {
    if (!std::isfinite(v)) return fail("non-finite pixel value");
    if (v < 0.0 || v > 1.0) return fail("pixel value outside [0,1]");
  }
  return true;
}

void require_valid(const Image& img, const char* ctx) {
  std::string why;
  if (!image_valid(img, &why))
    throw std::invalid_argument(std::string(ctx) + ": invalid image: " + why);
}

double image_mean(const Image& img) {
  double s = 0.0;
  for (double v : img.data) s += v;
  return img.data.empty() ? 0.0 : s / static_cast<double>(img.data.size());
}

bool bitwise_equal(const Image& a, const Image& b) {
  return a.same_shape(b) && a.data == b.data;
}

double max_abs_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

Image luma(const Image& img) {
  if (img.channels == 1) return img;
  Image out(img.height, img.width, 1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(y, x, 0) = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
  return out;
}

Image replicate3(const Image& img) {
  if (img.channels == 3) return img;
  Image out(img.height, img.width, 3);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, x, 0);
  return out;
}

Image crop(const Image& img, int y0, int x0, int h, int w) {
  if (y0 < 0 || x0 < 0 || y0 + h > img.height || x0 + w > img.width)
    throw std::invalid_argument("crop: window out of bounds");
  Image out(h, w, img.channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
  return out;
}

Image center_crop_square(const Image& img) {
  int s = std::min(img.height, img.width);
  int y0 = (img.height - s) / 2;
  int x0 = (img.width - s) / 2;
  return crop(img, y0, x0, s, s);
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("resize_bilinear: bad size");
  if (out_h == img.height && out_w == img.width) return img;
  Image out(out_h, out_w, img.channels);
  const double sy = static_cast<double>(img.height) / out_h;
  const double sx = static_cast<double>(img.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y1 = std::min(img.height - 1, std::max(0, y0 + 1));
    y0 = std::min(img.height - 1, std::max(0, y0));
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x1 = std::min(img.width - 1, std::max(0, x0 + 1));
      x0 = std::min(img.width - 1, std::max(0, x0));
      for (int c = 0; c < img.channels; ++c) {
        double top = img.at(y0, x0, c) * (1.0 - wx) + img.at(y0, x1, c) * wx;
        double bot = img.at(y1, x0, c) * (1.0 - wx) + img.at(y1, x1, c) * wx;
        out.at(y, x, c) = top * (1.0 - wy) + bot * wy;
      }
    }
  }
  clamp01(out);
  return out;
}

std::vector<uint8_t> quantize8(const Image& img) {
  std::vector<uint8_t> out(img.data.size());
  for (size_t i = 0; i < img.data.size(); ++i) {
    double v = std::round(img.data[i] * 255.0);
    out[i] = static_cast<uint8_t>(std::min(255.0, std::max(0.0, v)));
  }
  return out;
}

Image dequantize8(const std::vector<uint8_t>& bytes, int h, int w, int c) {
  Image out(h, w, c);
  if (bytes.size() != out.data.size()) throw std::invalid_argument("dequantize8: size mismatch");
  for (size_t i = 0; i < bytes.size(); ++i) out.data[i] = bytes[i] / 255.0;
  return out;
}

}  // namespace vpip
