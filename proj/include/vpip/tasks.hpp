#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vpip/image.hpp"

namespace vpip {

enum class Category { restoration, enhancement, stylization, feature_extraction };

// restoration: input = degrade(base), target = base
// transform:   input = base,          target = transform(base)
enum class PairDirection { degrade_input, transform_target };

std::string category_name(Category c);
Category category_from_name(const std::string& s);

struct ParamRange {
  std::string key;
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;
};

struct BucketDef {
  std::vector<ParamRange> ranges;
};

struct TaskDef {
  std::string name;
  Category category = Category::restoration;
  PairDirection direction = PairDirection::degrade_input;
  std::vector<BucketDef> buckets;  // mild -> severe
};

struct TaskSpec {
  std::string task_id;
  Category category = Category::restoration;
  int severity_bucket = 0;
  std::map<std::string, double> params;
};

struct SamplePair {
  Image input;
  Image target;
  TaskSpec task;
  uint64_t seed = 0;
  std::string base_id;
};

struct PromptPair {
  Image source;
  Image target;
  TaskSpec task;
  std::string base_id;
};

// The ~16-task default roster spanning all four categories.
const std::vector<TaskDef>& default_roster();
const TaskDef& task_def(const std::string& task_id);
bool task_exists(const std::string& task_id);

// Draw concrete params uniformly from the bucket's closed intervals.
TaskSpec sample_task_spec(const std::string& task_id, int bucket, uint64_t seed);

// Apply the task operator with the spec's params (the degrade/transform half).
Image apply_task(const TaskSpec& spec, const Image& img, uint64_t seed);

SamplePair make_sample(const TaskSpec& spec, const Image& base, const std::string& base_id,
                       uint64_t seed);

}  // namespace vpip
