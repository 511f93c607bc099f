#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <string>

#include "vpip/nn/model.hpp"
#include "vpip/nn/tensor.hpp"

namespace vpip::nn {

// "vpip-ckpt/1": 8-byte magic, u64 header length, JSON header, raw
// little-endian tensor data concatenated in header order.
inline constexpr char kCkptMagic[8] = {'V', 'P', 'I', 'P', 'C', 'K', 'P', '1'};

template <typename T>
struct CheckpointData {
  ModelConfig config;
  nlohmann::json extra;  // step count, profile echo, ...
  std::map<std::string, Tensor<T>> tensors;
};

template <typename T>
const char* dtype_name() {
  if constexpr (std::is_same_v<T, float>) return "f32";
  else if constexpr (std::is_same_v<T, double>) return "f64";
  else static_assert(sizeof(T) == 0, "unsupported checkpoint dtype");
}

template <typename T>
void save_checkpoint(const std::string& path, const CheckpointData<T>& ckpt) {
  nlohmann::json header;
  header["version"] = "vpip-ckpt/1";
  header["dtype"] = dtype_name<T>();
  header["config"] = ckpt.config.to_json();
  header["extra"] = ckpt.extra;
  nlohmann::json params = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : ckpt.tensors) {
    nlohmann::json p;
    p["name"] = name;
    p["shape"] = t.shape;
    p["offset"] = offset;
    params.push_back(p);
    offset += static_cast<uint64_t>(t.numel());
  }
  header["params"] = params;
  std::string hs = header.dump();

  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp.string());
    out.write(kCkptMagic, 8);
    uint64_t hlen = hs.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& [name, t] : ckpt.tensors)
      out.write(reinterpret_cast<const char*>(t.ptr()),
                static_cast<std::streamsize>(t.numel() * sizeof(T)));
    if (!out) throw std::runtime_error("checkpoint write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

template <typename T>
CheckpointData<T> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCkptMagic, 8) != 0)
    throw std::runtime_error("corrupt checkpoint (bad magic): " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("corrupt checkpoint (truncated header): " + path);
  nlohmann::json header = nlohmann::json::parse(hs);
  if (header.at("version").get<std::string>() != "vpip-ckpt/1")
    throw std::runtime_error("unsupported checkpoint version in " + path);
  if (header.at("dtype").get<std::string>() != dtype_name<T>())
    throw std::runtime_error("checkpoint dtype " + header.at("dtype").get<std::string>() +
                             " does not match build dtype " + dtype_name<T>());
  CheckpointData<T> ckpt;
  ckpt.config = ModelConfig::from_json(header.at("config"));
  ckpt.extra = header.value("extra", nlohmann::json::object());
  for (const auto& p : header.at("params")) {
    Tensor<T> t(p.at("shape").get<std::vector<int>>());
    in.read(reinterpret_cast<char*>(t.ptr()), static_cast<std::streamsize>(t.numel() * sizeof(T)));
    if (!in) throw std::runtime_error("corrupt checkpoint (truncated data): " + path);
    ckpt.tensors.emplace(p.at("name").get<std::string>(), std::move(t));
  }
  return ckpt;
}

// model <-> checkpoint tensor-map helpers; optimizer state rides along as
// "optim.m.<param>" / "optim.v.<param>".
template <typename T>
CheckpointData<T> checkpoint_from_model(const GenLV<T>& model, nlohmann::json extra) {
  CheckpointData<T> c;
  c.config = model.config;
  c.extra = std::move(extra);
  for (const auto& [name, t] : model.store.params) c.tensors.emplace("model." + name, t);
  return c;
}

template <typename T>
GenLV<T> model_from_checkpoint(const CheckpointData<T>& ckpt) {
  ParamStore<T> store;
  for (const auto& [name, t] : ckpt.tensors)
    if (name.rfind("model.", 0) == 0) store.params.emplace(name.substr(6), t);
  return GenLV<T>::from_store(ckpt.config, std::move(store));
}

}  // namespace vpip::nn
