#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>

#include "vpip/nn/model.hpp"
#include "vpip/nn/tape.hpp"

namespace vpip::nn {

// Decoupled weight decay skips biases, layer-norm affines and attention
// temperatures.
inline bool weight_decayed(const std::string& name) {
  if (name.size() >= 2 && name.compare(name.size() - 2, 2, ".b") == 0) return false;
  if (name.find(".ln") != std::string::npos) return false;
  if (name.size() >= 4 && name.compare(name.size() - 4, 4, ".tau") == 0) return false;
  return true;
}

template <typename T>
struct AdamW {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  int64_t step_count = 0;
  std::map<std::string, Tensor<T>> m, v;

  // one decoupled-weight-decay adaptive-moment update of the trainable set
  void update(ParamStore<T>& store, const Tape<T>& tape, const std::map<std::string, int>& nodes,
              const std::set<std::string>& trainable) {
    ++step_count;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (const auto& name : trainable) {
      auto nit = nodes.find(name);
      if (nit == nodes.end()) continue;
      const Tensor<T>& g = tape.grad(nit->second);
      Tensor<T>& p = store.params.at(name);
      if (g.data.empty()) continue;  // parameter unused in this graph
      auto& mt = m.try_emplace(name, Tensor<T>(p.shape, T(0))).first->second;
      auto& vt = v.try_emplace(name, Tensor<T>(p.shape, T(0))).first->second;
      const bool decay = weight_decayed(name);
      for (int64_t i = 0; i < p.numel(); ++i) {
        double gi = static_cast<double>(g.data[i]);
        double mi = beta1 * static_cast<double>(mt.data[i]) + (1.0 - beta1) * gi;
        double vi = beta2 * static_cast<double>(vt.data[i]) + (1.0 - beta2) * gi * gi;
        mt.data[i] = static_cast<T>(mi);
        vt.data[i] = static_cast<T>(vi);
        double mhat = mi / bc1;
        double vhat = vi / bc2;
        double upd = learning_rate * (mhat / (std::sqrt(vhat) + eps));
        if (decay) upd += learning_rate * weight_decay * static_cast<double>(p.data[i]);
        p.data[i] = static_cast<T>(static_cast<double>(p.data[i]) - upd);
      }
    }
  }
};

}  // namespace vpip::nn
