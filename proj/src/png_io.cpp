#include "vpip/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <vector>

namespace vpip {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open PNG for reading: " + path);

  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw std::runtime_error("not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng error while reading: " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = pixels.data() + y * rowbytes;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (rowbytes != static_cast<size_t>(w) * 3)
    throw std::runtime_error("unexpected PNG row layout: " + path);

  Image out(static_cast<int>(h), static_cast<int>(w), 3);
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] = pixels[i] / 255.0;
  return out;
}

void write_png(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("write_png: channels must be 1 or 3");
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";

  std::vector<uint8_t> bytes = quantize8(img);
  {
    FilePtr fp(std::fopen(tmp.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open PNG for writing: " + tmp.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw std::runtime_error("libpng error while writing: " + tmp.string());
    }
    png_init_io(png, fp.get());
    int color = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height);
    size_t rowbytes = static_cast<size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) rows[y] = bytes.data() + y * rowbytes;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace vpip
