// throwaway validation harness for the autograd core (not part of the build)
#include <cstdio>

#include "support/gradcheck.hpp"
#include "vpip/nn/adamw.hpp"
#include "vpip/nn/model.hpp"

using namespace vpip;
using namespace vpip::nn;
using vpip::testing::finite_diff_check;

// gradcheck one parameter tensor of a model forward + L1-style loss
static double check_param(GenLV<double>& model, const std::string& pname, uint64_t seed) {
  const int S = model.config.image_size;
  Rng rng(seed);
  Tensor<double> in({1, 3, S, S}), ps({1, 3, S, S}), pt({1, 3, S, S}), tgt({1, 3, S, S});
  for (auto* t : {&in, &ps, &pt, &tgt})
    for (auto& v : t->data) v = std::min(0.85, std::max(0.15, 0.5 + 0.2 * rng.normal()));

  auto loss_with = [&](const std::vector<double>& theta) {
    Tensor<double>& p = model.store.params.at(pname);
    std::vector<double> saved = p.data;
    p.data = theta;
    Tape<double> g;
    g.grad_enabled = false;
    auto b = model.bind(g);
    int i = g.input(in), s = g.input(ps), t = g.input(pt), y = g.input(tgt);
    int out = model.forward_nodes(g, b, i, s, t);
    int l = g.mean_all(g.abs(g.sub(out, y)));
    double v = g.val(l).data[0];
    p.data = saved;
    return v;
  };

  std::set<std::string> trainable{pname};
  Tape<double> g;
  auto b = model.bind(g, &trainable);
  int i = g.input(in), s = g.input(ps), t = g.input(pt), y = g.input(tgt);
  int out = model.forward_nodes(g, b, i, s, t);
  int l = g.mean_all(g.abs(g.sub(out, y)));
  g.backward(l);
  const auto& agrad = g.grad(b.nodes.at(pname));

  auto res = finite_diff_check(loss_with, model.store.params.at(pname).data, agrad.data, 10,
                               seed ^ 0xabc, 1e-6);
  std::printf("  %-40s rel_err %.3e (ana %.3e num %.3e)\n", pname.c_str(), res.max_rel_err,
              res.worst_analytic, res.worst_numeric);
  return res.max_rel_err;
}

int main() {
  ModelConfig cfg;
  cfg.num_blocks = {1, 1};
  cfg.channels = {4, 8};
  cfg.heads = {2, 2};
  cfg.prompt_channels = 4;
  cfg.window_size = 2;
  cfg.image_size = 8;
  cfg.validate();

  GenLV<double> model = GenLV<double>::build(cfg, 7);
  std::printf("params: %lld\n", static_cast<long long>(model.store.count_params()));

  // move every parameter (incl. the zero head) off init so gradients flow
  Rng prng(99);
  for (auto& [name, t] : model.store.params)
    for (auto& v : t.data) v += 0.05 * prng.normal();

  double worst = 0;
  int k = 0;
  for (const auto& [name, t] : model.store.params) {
    if (k++ % 7 != 0 && name.find("pcab") == std::string::npos &&
        name.find("head") == std::string::npos)
      continue;  // sample a subset plus every pcab/head param
    worst = std::max(worst, check_param(model, name, 1000 + k));
  }
  std::printf("worst rel err: %.3e -> %s\n", worst, worst < 1e-4 ? "OK" : "FAIL");
  return worst < 1e-4 ? 0 : 1;
}
