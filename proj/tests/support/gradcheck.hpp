#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "vpip/nn/tensor.hpp"
#include "vpip/rng.hpp"

namespace vpip::testing {

// Central finite differences against an analytic gradient on a sampled set
// of coordinates. `loss` evaluates the scalar for the given flat parameter
// vector; `agrad` is the analytic gradient at the unperturbed point.
struct GradCheckResult {
  double max_rel_err = 0.0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int worst_coord = -1;
};

inline GradCheckResult finite_diff_check(std::function<double(const std::vector<double>&)> loss,
                                         std::vector<double> theta,
                                         const std::vector<double>& agrad, int n_coords,
                                         uint64_t seed, double step = 1e-5) {
  Rng rng(seed);
  GradCheckResult res;
  const int n = static_cast<int>(theta.size());
  for (int s = 0; s < n_coords; ++s) {
    int i = n_coords >= n ? (s % n) : rng.uniform_int(0, n - 1);
    double orig = theta[i];
    theta[i] = orig + step;
    double up = loss(theta);
    theta[i] = orig - step;
    double dn = loss(theta);
    theta[i] = orig;
    double num = (up - dn) / (2.0 * step);
    double ana = agrad[i];
    double denom = std::max({std::abs(num), std::abs(ana), 1e-8});
    double rel = std::abs(num - ana) / denom;
    if (rel > res.max_rel_err) {
      res.max_rel_err = rel;
      res.worst_analytic = ana;
      res.worst_numeric = num;
      res.worst_coord = i;
    }
  }
  return res;
}

inline std::vector<double> random_vec(size_t n, uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace vpip::testing
