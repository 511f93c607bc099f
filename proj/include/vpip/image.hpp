#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpip {

// H x W x C interleaved raster, values in [0,1], C in {1,3}.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, fill) {}

  double& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  size_t numel() const { return data.size(); }
  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool empty() const { return data.empty(); }
};

inline Image constant_image(int h, int w, int c, double v) { return Image(h, w, c, v); }

void clamp01(Image& img);
bool image_valid(const Image& img, std::string* why = nullptr);
void require_valid(const Image& img, const char* ctx);

double image_mean(const Image& img);
bool bitwise_equal(const Image& a, const Image& b);
double max_abs_diff(const Image& a, const Image& b);

// ITU-R 601 luma; identity for single-channel images.
Image luma(const Image& img);
Image replicate3(const Image& img);

Image center_crop_square(const Image& img);
Image crop(const Image& img, int y0, int x0, int h, int w);
Image resize_bilinear(const Image& img, int out_h, int out_w);

// 8-bit quantization used identically for every image written to disk.
std::vector<uint8_t> quantize8(const Image& img);
Image dequantize8(const std::vector<uint8_t>& bytes, int h, int w, int c);

}  // namespace vpip
