#include "vpip/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "vpip/operators.hpp"
#include "vpip/rng.hpp"

namespace vpip {

std::string category_name(Category c) {
  switch (c) {
    case Category::restoration: return "restoration";
    case Category::enhancement: return "enhancement";
    case Category::stylization: return "stylization";
    case Category::feature_extraction: return "feature_extraction";
  }
  return "?";
}

Category category_from_name(const std::string& s) {
  if (s == "restoration") return Category::restoration;
  if (s == "enhancement") return Category::enhancement;
  if (s == "stylization") return Category::stylization;
  if (s == "feature_extraction") return Category::feature_extraction;
  throw std::invalid_argument("unknown category: " + s);
}

namespace {

std::vector<TaskDef> build_roster() {
  using PR = ParamRange;
  auto B = [](std::vector<PR> rs) { return BucketDef{std::move(rs)}; };
  std::vector<TaskDef> r;

  // -- restoration ---------------------------------------------------------
  r.push_back({"gaussian_noise", Category::restoration, PairDirection::degrade_input,
               {B({{"sigma", 0.03, 0.07}}), B({{"sigma", 0.07, 0.13}}), B({{"sigma", 0.13, 0.2}})}});
  r.push_back({"poisson_noise", Category::restoration, PairDirection::degrade_input,
               {B({{"peak", 400, 800}}), B({{"peak", 100, 400}}), B({{"peak", 25, 100}})}});
  r.push_back({"salt_pepper", Category::restoration, PairDirection::degrade_input,
               {B({{"p", 0.01, 0.04}}), B({{"p", 0.04, 0.1}}), B({{"p", 0.1, 0.2}})}});
  r.push_back({"gaussian_blur", Category::restoration, PairDirection::degrade_input,
               {B({{"sigma", 0.6, 1.0}}), B({{"sigma", 1.0, 2.0}}), B({{"sigma", 2.0, 3.5}})}});
  r.push_back({"jpeg", Category::restoration, PairDirection::degrade_input,
               {B({{"quality", 60, 85, true}}), B({{"quality", 30, 60, true}}),
                B({{"quality", 10, 30, true}})}});
  r.push_back({"ringing", Category::restoration, PairDirection::degrade_input,
               {B({{"cutoff", 0.35, 0.5}}), B({{"cutoff", 0.2, 0.35}}), B({{"cutoff", 0.1, 0.2}})}});
  r.push_back({"rl_artifact", Category::restoration, PairDirection::degrade_input,
               {B({{"psf_sigma", 0.8, 1.2}, {"iters", 15, 25, true}}),
                B({{"psf_sigma", 1.2, 1.8}, {"iters", 25, 40, true}}),
                B({{"psf_sigma", 1.8, 2.5}, {"iters", 40, 60, true}})}});
  r.push_back({"pixelation", Category::restoration, PairDirection::degrade_input,
               {B({{"factor", 2, 3, true}}), B({{"factor", 4, 6, true}}),
                B({{"factor", 8, 12, true}})}});
  r.push_back({"inpainting", Category::restoration, PairDirection::degrade_input,
               {B({{"coverage", 0.05, 0.1}}), B({{"coverage", 0.1, 0.2}}),
                B({{"coverage", 0.2, 0.35}})}});
  r.push_back({"rain", Category::restoration, PairDirection::degrade_input,
               {B({{"density", 0.5, 1.5}, {"angle", -30, 30}}),
                B({{"density", 1.5, 3.5}, {"angle", -30, 30}}),
                B({{"density", 3.5, 7.0}, {"angle", -30, 30}})}});

  // -- enhancement (corrections: input is the distorted side) ---------------
  r.push_back({"brightness_correction", Category::enhancement, PairDirection::degrade_input,
               {B({{"factor", 0.55, 0.75}}), B({{"factor", 0.4, 0.55}}), B({{"factor", 0.25, 0.4}})}});
  r.push_back({"contrast_correction", Category::enhancement, PairDirection::degrade_input,
               {B({{"factor", 0.55, 0.75}}), B({{"factor", 0.4, 0.55}}), B({{"factor", 0.25, 0.4}})}});
  r.push_back({"saturation_correction", Category::enhancement, PairDirection::degrade_input,
               {B({{"factor", 0.4, 0.6}}), B({{"factor", 0.2, 0.4}}), B({{"factor", 0.0, 0.2}})}});
  r.push_back({"lowlight_gamma", Category::enhancement, PairDirection::degrade_input,
               {B({{"gamma", 1.6, 2.0}}), B({{"gamma", 2.0, 2.4}}), B({{"gamma", 2.4, 3.0}})}});
  // underwater-style contrast enhancement: the equalized image is the target
  r.push_back({"ice_hist_equalize", Category::enhancement, PairDirection::transform_target,
               {B({})}});

  // -- stylization ----------------------------------------------------------
  r.push_back({"pencil_sketch", Category::stylization, PairDirection::transform_target,
               {B({{"blur_sigma", 2.0, 4.0}})}});
  r.push_back({"cartoon", Category::stylization, PairDirection::transform_target,
               {B({{"levels", 5, 8, true}, {"smooth_iters", 2, 3, true}})}});

  // -- feature extraction ----------------------------------------------------
  r.push_back({"canny_edge", Category::feature_extraction, PairDirection::transform_target,
               {B({{"low", 0.15, 0.15}, {"high", 0.3, 0.3}})}});
  r.push_back({"laplacian_edge", Category::feature_extraction, PairDirection::transform_target,
               {B({})}});
  return r;
}

}  // namespace

const std::vector<TaskDef>& default_roster() {
  static const std::vector<TaskDef> roster = build_roster();
  return roster;
}

const TaskDef& task_def(const std::string& task_id) {
  for (const auto& t : default_roster())
    if (t.name == task_id) return t;
  throw std::invalid_argument("unknown task_id: " + task_id);
}

bool task_exists(const std::string& task_id) {
  for (const auto& t : default_roster())
    if (t.name == task_id) return true;
  return false;
}

TaskSpec sample_task_spec(const std::string& task_id, int bucket, uint64_t seed) {
  const TaskDef& def = task_def(task_id);
  if (bucket < 0 || bucket >= static_cast<int>(def.buckets.size()))
    throw std::invalid_argument("sample_task_spec: bucket out of range for " + task_id);
  Rng rng(hash_combine(seed, fnv1a("params")));
  TaskSpec spec;
  spec.task_id = task_id;
  spec.category = def.category;
  spec.severity_bucket = bucket;
  for (const auto& pr : def.buckets[bucket].ranges) {
    double v = pr.integer ? static_cast<double>(rng.uniform_int(static_cast<int>(pr.lo),
                                                                static_cast<int>(pr.hi)))
                          : rng.uniform(pr.lo, pr.hi);
    spec.params[pr.key] = v;
  }
  return spec;
}

namespace {

double param(const TaskSpec& s, const std::string& key) {
  auto it = s.params.find(key);
  if (it == s.params.end())
    throw std::invalid_argument("task " + s.task_id + ": missing param '" + key + "'");
  return it->second;
}

}  // namespace

Image apply_task(const TaskSpec& s, const Image& img, uint64_t seed) {
  const std::string& id = s.task_id;
  if (id == "gaussian_noise") return apply_gaussian_noise(img, param(s, "sigma"), seed);
  if (id == "poisson_noise") return apply_poisson_noise(img, param(s, "peak"), seed);
  if (id == "salt_pepper") return apply_salt_pepper(img, param(s, "p"), seed);
  if (id == "gaussian_blur") {
    double sigma = param(s, "sigma");
    int k = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    return apply_gaussian_blur(img, sigma, k);
  }
  if (id == "jpeg") return apply_jpeg_like(img, static_cast<int>(param(s, "quality")));
  if (id == "ringing") return apply_ringing(img, param(s, "cutoff"));
  if (id == "rl_artifact")
    return apply_rl_artifact(img, param(s, "psf_sigma"), static_cast<int>(param(s, "iters")));
  if (id == "pixelation") return apply_pixelation(img, static_cast<int>(param(s, "factor")));
  if (id == "inpainting") return apply_inpaint_mask(img, param(s, "coverage"), seed).first;
  if (id == "rain") return apply_rain_streaks(img, param(s, "density"), param(s, "angle"), seed);
  if (id == "brightness_correction") return adjust_tone(img, ToneKind::brightness, param(s, "factor"));
  if (id == "contrast_correction") return adjust_tone(img, ToneKind::contrast, param(s, "factor"));
  if (id == "saturation_correction") {
    double f = std::max(0.0, param(s, "factor"));
    if (f == 0.0) return replicate3(luma(img));
    return adjust_tone(img, ToneKind::saturation, f);
  }
  if (id == "lowlight_gamma") return adjust_tone(img, ToneKind::gamma, param(s, "gamma"));
  if (id == "ice_hist_equalize") return hist_equalize(img);
  if (id == "pencil_sketch") return stylize_pencil(img, param(s, "blur_sigma"));
  if (id == "cartoon")
    return stylize_cartoon(img, static_cast<int>(param(s, "levels")),
                           static_cast<int>(param(s, "smooth_iters")));
  if (id == "canny_edge") return edge_canny(img, param(s, "low"), param(s, "high"));
  if (id == "laplacian_edge") return edge_laplacian(img);
  throw std::invalid_argument("apply_task: task not implemented: " + id);
}

SamplePair make_sample(const TaskSpec& spec, const Image& base, const std::string& base_id,
                       uint64_t seed) {
  require_valid(base, "make_sample");
  const TaskDef& def = task_def(spec.task_id);
  SamplePair out;
  out.task = spec;
  out.seed = seed;
  out.base_id = base_id;
  Image transformed = apply_task(spec, base, seed);
  if (def.direction == PairDirection::degrade_input) {
    out.input = std::move(transformed);
    out.target = base;
  } else {
    out.input = base;
    out.target = std::move(transformed);
  }
  return out;
}

}  // namespace vpip
