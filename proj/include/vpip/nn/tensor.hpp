#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpip::nn {

// Dense row-major tensor with a dynamic shape.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(count(shape), T(0)) {}
  Tensor(std::vector<int> s, T fill) : shape(std::move(s)), data(count(shape), fill) {}

  static int64_t count(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) {
      if (d <= 0) throw std::invalid_argument("Tensor: nonpositive dimension");
      n *= d;
    }
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int dim(int i) const { return shape.at(i); }
  int rank() const { return static_cast<int>(shape.size()); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

inline std::string shape_str(const std::vector<int>& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

template <typename T>
void require_shape(const Tensor<T>& t, const std::vector<int>& s, const char* ctx) {
  if (t.shape != s)
    throw std::invalid_argument(std::string(ctx) + ": expected shape " + shape_str(s) + ", got " +
                                shape_str(t.shape));
}

}  // namespace vpip::nn
