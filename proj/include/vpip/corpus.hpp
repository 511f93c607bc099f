#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vpip/tasks.hpp"

namespace vpip {

struct ManifestEntry {
  std::string task_id;
  int severity_bucket = 0;
  int index = 0;
  uint64_t seed = 0;
  std::string base_id;
  std::string input_path;   // relative to corpus root
  std::string target_path;  // relative to corpus root
  std::map<std::string, double> params;
};

struct CorpusManifest {
  std::string version = "vpip-corpus/1";
  uint64_t corpus_seed = 0;
  int sample_size = 0;
  int skipped_files = 0;
  std::vector<std::string> tasks;  // roster subset used
  std::vector<ManifestEntry> entries;
  std::string root;  // directory holding manifest.json (not serialized)

  std::vector<const ManifestEntry*> entries_for(const std::string& task_id,
                                                int severity_bucket = -1) const;
  std::vector<std::string> task_ids() const;
};

struct SynthConfig {
  std::vector<std::string> tasks;  // task ids from the default roster
  int samples_per_task = 10;
  int sample_size = 64;
  uint64_t corpus_seed = 0;
};

// Stable per-sample seed; extending the roster never perturbs existing samples.
uint64_t sample_seed(uint64_t corpus_seed, const std::string& task_id, int index);

// Reads clean images from clean_dir (PNG), crops/resizes to sample_size,
// synthesizes every (task, index) pair and writes the on-disk corpus:
//   <out_root>/images/<task_id>/<index>_{input,target}.png, <out_root>/manifest.json
CorpusManifest synthesize_corpus(const SynthConfig& config, const std::string& clean_dir,
                                 const std::string& out_root);

void save_manifest(const CorpusManifest& m, const std::string& path);
CorpusManifest load_manifest(const std::string& path);

Image load_corpus_image(const CorpusManifest& m, const std::string& rel_path);

// Uniformly selects a severity-matched prompt pair with a different base image.
PromptPair sample_prompt_pair(const CorpusManifest& m, const TaskSpec& query,
                              const std::string& exclude_base_id, uint64_t seed);

}  // namespace vpip
