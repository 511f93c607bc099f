#include "vpip/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vpip/png_io.hpp"
#include "vpip/rng.hpp"

namespace vpip {

namespace {

struct Palette {
  double r, g, b;
};

Palette pick_color(Rng& rng) {
  return {0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform()};
}

void fill_linear_gradient(Image& img, Rng& rng) {
  Palette a = pick_color(rng), b = pick_color(rng);
  double ang = rng.uniform(0.0, 2.0 * M_PI);
  double cx = std::cos(ang), sy = std::sin(ang);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double t = 0.5 + 0.5 * ((x - img.width / 2.0) * cx + (y - img.height / 2.0) * sy) /
                           (0.7 * std::max(img.width, img.height));
      t = std::min(1.0, std::max(0.0, t));
      img.at(y, x, 0) = a.r * (1 - t) + b.r * t;
      img.at(y, x, 1) = a.g * (1 - t) + b.g * t;
      img.at(y, x, 2) = a.b * (1 - t) + b.b * t;
    }
}

void fill_radial(Image& img, Rng& rng) {
  Palette a = pick_color(rng), b = pick_color(rng);
  double cx = rng.uniform(0.3, 0.7) * img.width;
  double cy = rng.uniform(0.3, 0.7) * img.height;
  double r0 = 0.8 * std::max(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double t = std::min(1.0, std::hypot(x - cx, y - cy) / r0);
      img.at(y, x, 0) = a.r * (1 - t) + b.r * t;
      img.at(y, x, 1) = a.g * (1 - t) + b.g * t;
      img.at(y, x, 2) = a.b * (1 - t) + b.b * t;
    }
}

void fill_plaid(Image& img, Rng& rng) {
  Palette a = pick_color(rng);
  double fx = rng.uniform(1.5, 4.0), fy = rng.uniform(1.5, 4.0);
  double px = rng.uniform(0.0, 2 * M_PI), py = rng.uniform(0.0, 2 * M_PI);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double u = 0.5 + 0.25 * std::sin(2 * M_PI * fx * x / img.width + px) +
                 0.25 * std::sin(2 * M_PI * fy * y / img.height + py);
      img.at(y, x, 0) = u * a.r + 0.15;
      img.at(y, x, 1) = u * a.g + 0.15;
      img.at(y, x, 2) = u * a.b + 0.15;
    }
}

void fill_blobs(Image& img, Rng& rng) {
  Palette base = pick_color(rng);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      img.at(y, x, 0) = 0.4 * base.r + 0.2;
      img.at(y, x, 1) = 0.4 * base.g + 0.2;
      img.at(y, x, 2) = 0.4 * base.b + 0.2;
    }
  int n = rng.uniform_int(4, 7);
  for (int i = 0; i < n; ++i) {
    Palette c = pick_color(rng);
    double cx = rng.uniform(0.1, 0.9) * img.width;
    double cy = rng.uniform(0.1, 0.9) * img.height;
    double s = rng.uniform(0.08, 0.22) * img.width;
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s);
        double w = std::exp(-d2);
        img.at(y, x, 0) = img.at(y, x, 0) * (1 - w) + c.r * w;
        img.at(y, x, 1) = img.at(y, x, 1) * (1 - w) + c.g * w;
        img.at(y, x, 2) = img.at(y, x, 2) * (1 - w) + c.b * w;
      }
  }
}

void draw_disk(Image& img, Rng& rng) {
  Palette c = pick_color(rng);
  double cx = rng.uniform(0.25, 0.75) * img.width;
  double cy = rng.uniform(0.25, 0.75) * img.height;
  double r = rng.uniform(0.12, 0.3) * img.width;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (std::hypot(x - cx, y - cy) <= r) {
        img.at(y, x, 0) = c.r;
        img.at(y, x, 1) = c.g;
        img.at(y, x, 2) = c.b;
      }
}

void draw_rect(Image& img, Rng& rng) {
  Palette c = pick_color(rng);
  int w = std::max(4, static_cast<int>(rng.uniform(0.15, 0.4) * img.width));
  int h = std::max(4, static_cast<int>(rng.uniform(0.15, 0.4) * img.height));
  int x0 = rng.uniform_int(0, std::max(0, img.width - w - 1));
  int y0 = rng.uniform_int(0, std::max(0, img.height - h - 1));
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) {
      img.at(y, x, 0) = c.r;
      img.at(y, x, 1) = c.g;
      img.at(y, x, 2) = c.b;
    }
}

void draw_bar(Image& img, Rng& rng) {
  Palette c = pick_color(rng);
  double ang = rng.uniform(0.0, M_PI);
  double nx = -std::sin(ang), ny = std::cos(ang);
  double off = rng.uniform(-0.2, 0.2) * img.width;
  double halfw = rng.uniform(0.02, 0.06) * img.width + 1.0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double d = (x - img.width / 2.0) * nx + (y - img.height / 2.0) * ny - off;
      if (std::abs(d) <= halfw) {
        img.at(y, x, 0) = c.r;
        img.at(y, x, 1) = c.g;
        img.at(y, x, 2) = c.b;
      }
    }
}

}  // namespace

Image make_fixture_image(int index, int size) {
  Rng rng(hash_combine(0x76706970ULL /* "vpip" */, static_cast<uint64_t>(index)));
  Image img(size, size, 3);
  switch (index % 4) {
    case 0: fill_linear_gradient(img, rng); break;
    case 1: fill_radial(img, rng); break;
    case 2: fill_plaid(img, rng); break;
    default: fill_blobs(img, rng); break;
  }
  int shapes = rng.uniform_int(2, 4);
  for (int i = 0; i < shapes; ++i) {
    switch (rng.uniform_int(0, 2)) {
      case 0: draw_disk(img, rng); break;
      case 1: draw_rect(img, rng); break;
      default: draw_bar(img, rng); break;
    }
  }
  clamp01(img);
  return img;
}

std::vector<std::string> write_fixture_set(const std::string& dir, int count, int size,
                                           int first_index) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (int i = 0; i < count; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "fixture_%03d.png", first_index + i);
    std::string path = (std::filesystem::path(dir) / name).string();
    write_png(path, make_fixture_image(first_index + i, size));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace vpip
