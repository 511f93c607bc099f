#include "vpip/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "vpip/png_io.hpp"
#include "vpip/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace vpip {

std::vector<const ManifestEntry*> CorpusManifest::entries_for(const std::string& task_id,
                                                              int severity_bucket) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries)
    if (e.task_id == task_id && (severity_bucket < 0 || e.severity_bucket == severity_bucket))
      out.push_back(&e);
  return out;
}

std::vector<std::string> CorpusManifest::task_ids() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (std::find(out.begin(), out.end(), e.task_id) == out.end()) out.push_back(e.task_id);
  return out;
}

uint64_t sample_seed(uint64_t corpus_seed, const std::string& task_id, int index) {
  return hash_combine(hash_combine(corpus_seed, fnv1a(task_id)), static_cast<uint64_t>(index));
}

namespace {

json entry_to_json(const ManifestEntry& e) {
  json j;
  j["task_id"] = e.task_id;
  j["severity_bucket"] = e.severity_bucket;
  j["index"] = e.index;
  j["seed"] = e.seed;
  j["base_id"] = e.base_id;
  j["input"] = e.input_path;
  j["target"] = e.target_path;
  j["params"] = e.params;
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  ManifestEntry e;
  e.task_id = j.at("task_id").get<std::string>();
  e.severity_bucket = j.at("severity_bucket").get<int>();
  e.index = j.at("index").get<int>();
  e.seed = j.at("seed").get<uint64_t>();
  e.base_id = j.at("base_id").get<std::string>();
  e.input_path = j.at("input").get<std::string>();
  e.target_path = j.at("target").get<std::string>();
  for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it)
    e.params[it.key()] = it.value().get<double>();
  return e;
}

json roster_to_json(const std::vector<std::string>& tasks) {
  json arr = json::array();
  for (const auto& name : tasks) {
    const TaskDef& def = task_def(name);
    json t;
    t["task_id"] = def.name;
    t["category"] = category_name(def.category);
    t["direction"] = def.direction == PairDirection::degrade_input ? "degrade_input"
                                                                   : "transform_target";
    json buckets = json::array();
    for (const auto& b : def.buckets) {
      json ranges = json::object();
      for (const auto& r : b.ranges) ranges[r.key] = json::array({r.lo, r.hi});
      buckets.push_back(ranges);
    }
    t["severity_buckets"] = buckets;
    arr.push_back(t);
  }
  return arr;
}

void atomic_write_text(const std::string& path, const std::string& text) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + tmp);
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace

void save_manifest(const CorpusManifest& m, const std::string& path) {
  json j;
  j["version"] = m.version;
  j["corpus_seed"] = m.corpus_seed;
  j["sample_size"] = m.sample_size;
  j["skipped_files"] = m.skipped_files;
  j["roster"] = roster_to_json(m.tasks);
  j["tasks"] = m.tasks;
  json entries = json::array();
  for (const auto& e : m.entries) entries.push_back(entry_to_json(e));
  j["entries"] = entries;
  atomic_write_text(path, j.dump(2) + "\n");
}

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j = json::parse(in);
  CorpusManifest m;
  m.version = j.at("version").get<std::string>();
  if (m.version != "vpip-corpus/1")
    throw std::runtime_error("unsupported corpus version: " + m.version);
  m.corpus_seed = j.at("corpus_seed").get<uint64_t>();
  m.sample_size = j.at("sample_size").get<int>();
  m.skipped_files = j.at("skipped_files").get<int>();
  m.tasks = j.at("tasks").get<std::vector<std::string>>();
  for (const auto& e : j.at("entries")) m.entries.push_back(entry_from_json(e));
  m.root = fs::path(path).parent_path().string();
  return m;
}

Image load_corpus_image(const CorpusManifest& m, const std::string& rel_path) {
  return read_png((fs::path(m.root) / rel_path).string());
}

CorpusManifest synthesize_corpus(const SynthConfig& config, const std::string& clean_dir,
                                 const std::string& out_root) {
  if (config.tasks.empty()) throw std::invalid_argument("synthesize_corpus: empty task list");
  if (config.samples_per_task < 1)
    throw std::invalid_argument("synthesize_corpus: samples_per_task must be >= 1");
  if (config.sample_size < 8)
    throw std::invalid_argument("synthesize_corpus: sample_size must be >= 8");
  for (const auto& t : config.tasks) task_def(t);  // validates names

  if (!fs::is_directory(clean_dir))
    throw std::invalid_argument("synthesize_corpus: clean image directory not found: " + clean_dir);

  std::vector<std::string> files;
  for (const auto& de : fs::directory_iterator(clean_dir))
    if (de.is_regular_file() && de.path().extension() == ".png") files.push_back(de.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::invalid_argument("synthesize_corpus: no PNG images in " + clean_dir);

  int skipped = 0;
  std::vector<Image> bases;
  std::vector<std::string> base_ids;
  for (const auto& f : files) {
    try {
      Image img = read_png(f);
      img = center_crop_square(img);
      img = resize_bilinear(img, config.sample_size, config.sample_size);
      bases.push_back(std::move(img));
      base_ids.push_back(fs::path(f).stem().string());
    } catch (const std::exception&) {
      ++skipped;  // unreadable file: skip, count in manifest
    }
  }
  if (bases.empty()) throw std::runtime_error("synthesize_corpus: no readable images");

  CorpusManifest m;
  m.corpus_seed = config.corpus_seed;
  m.sample_size = config.sample_size;
  m.skipped_files = skipped;
  m.tasks = config.tasks;
  m.root = out_root;

  fs::create_directories(out_root);
  const int n_bases = static_cast<int>(bases.size());
  for (const auto& task_id : config.tasks) {
    const TaskDef& def = task_def(task_id);
    fs::create_directories(fs::path(out_root) / "images" / task_id);
    const int n_buckets = static_cast<int>(def.buckets.size());
    const int rot = static_cast<int>(mix64(hash_combine(config.corpus_seed, fnv1a(task_id))) %
                                     static_cast<uint64_t>(n_bases));
    for (int i = 0; i < config.samples_per_task; ++i) {
      uint64_t seed = sample_seed(config.corpus_seed, task_id, i);
      int bucket = i % n_buckets;
      int base_idx = (i + rot) % n_bases;
      TaskSpec spec = sample_task_spec(task_id, bucket, seed);
      SamplePair pair = make_sample(spec, bases[base_idx], base_ids[base_idx], seed);

      char stem[32];
      std::snprintf(stem, sizeof(stem), "%06d", i);
      std::string rel_in = "images/" + task_id + "/" + stem + "_input.png";
      std::string rel_tg = "images/" + task_id + "/" + stem + "_target.png";
      write_png((fs::path(out_root) / rel_in).string(), pair.input);
      write_png((fs::path(out_root) / rel_tg).string(), pair.target);

      ManifestEntry e;
      e.task_id = task_id;
      e.severity_bucket = bucket;
      e.index = i;
      e.seed = seed;
      e.base_id = base_ids[base_idx];
      e.input_path = rel_in;
      e.target_path = rel_tg;
      e.params = spec.params;
      m.entries.push_back(std::move(e));
    }
  }
  std::sort(m.entries.begin(), m.entries.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return a.task_id != b.task_id ? a.task_id < b.task_id : a.index < b.index;
  });
  save_manifest(m, (fs::path(out_root) / "manifest.json").string());
  return m;
}

PromptPair sample_prompt_pair(const CorpusManifest& m, const TaskSpec& query,
                              const std::string& exclude_base_id, uint64_t seed) {
  std::vector<const ManifestEntry*> pool;
  for (const auto& e : m.entries)
    if (e.task_id == query.task_id && e.severity_bucket == query.severity_bucket &&
        e.base_id != exclude_base_id)
      pool.push_back(&e);
  if (pool.empty())
    throw std::runtime_error("insufficient prompt pool for task '" + query.task_id +
                             "' severity bucket " + std::to_string(query.severity_bucket));
  Rng rng(hash_combine(seed, fnv1a("prompt_pick")));
  const ManifestEntry& e = *pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
  PromptPair p;
  p.source = load_corpus_image(m, e.input_path);
  p.target = load_corpus_image(m, e.target_path);
  p.task.task_id = e.task_id;
  p.task.category = task_def(e.task_id).category;
  p.task.severity_bucket = e.severity_bucket;
  p.task.params = e.params;
  p.base_id = e.base_id;
  return p;
}

}  // namespace vpip
