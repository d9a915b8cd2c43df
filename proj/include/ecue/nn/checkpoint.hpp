#pragma once

// Checkpoint = JSON manifest (names, shapes, dtypes, offsets, metadata) plus
// one little-endian f32 blob next to it with the same stem and a .bin
// extension. Values are stored as f32; quantize_to_f32() makes an in-memory
// model match what a save/load cycle produces.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/binary_io.hpp"
#include "ecue/error.hpp"
#include "ecue/nn/tensor.hpp"

namespace ecue::nn {

inline constexpr const char* kCheckpointFormat = "ecue-checkpoint-v1";

struct StoredTensor {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

struct Checkpoint {
  std::vector<StoredTensor> tensors;
  nlohmann::json meta = nlohmann::json::object();
};

inline std::filesystem::path blob_path_for(const std::filesystem::path& manifest) {
  auto p = manifest;
  p.replace_extension(".bin");
  return p;
}

inline void quantize_to_f32(ParamList& params) {
  for (auto& p : params)
    for (auto& v : p.tensor.data()) v = static_cast<double>(static_cast<float>(v));
}

inline void save_checkpoint(const std::filesystem::path& manifest_path,
                            const ParamList& params,
                            const nlohmann::json& meta = nlohmann::json::object()) {
  std::vector<unsigned char> blob;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& p : params) {
    entries.push_back({{"name", p.name},
                       {"shape", p.tensor.shape()},
                       {"dtype", "f32"},
                       {"offset", blob.size()},
                       {"count", p.tensor.size()}});
    append_f32_le(blob, p.tensor.data());
  }
  const auto blob_path = blob_path_for(manifest_path);
  nlohmann::json manifest = {{"format", kCheckpointFormat},
                             {"endianness", "little"},
                             {"blob", blob_path.filename().string()},
                             {"blob_bytes", blob.size()},
                             {"tensors", entries},
                             {"meta", meta}};
  write_file(blob_path, blob);
  write_text_file(manifest_path, manifest.dump(2) + "\n");
}

inline Checkpoint load_checkpoint(const std::filesystem::path& manifest_path) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("checkpoint manifest: " + std::string(e.what()));
  }
  Checkpoint ck;
  try {
    if (manifest.at("format").get<std::string>() != kCheckpointFormat)
      throw ValidationError("unsupported checkpoint format");
    const auto blob = read_file(manifest_path.parent_path() /
                                manifest.at("blob").get<std::string>());
    for (const auto& e : manifest.at("tensors")) {
      if (e.at("dtype").get<std::string>() != "f32")
        throw ValidationError("unsupported dtype in checkpoint");
      StoredTensor t;
      t.name = e.at("name").get<std::string>();
      t.shape = e.at("shape").get<Shape>();
      const auto count = e.at("count").get<std::size_t>();
      if (count != shape_size(t.shape))
        throw ValidationError("checkpoint tensor '" + t.name + "' count/shape mismatch");
      t.values = read_f32_le(blob, e.at("offset").get<std::size_t>(), count);
      ck.tensors.push_back(std::move(t));
    }
    if (manifest.contains("meta")) ck.meta = manifest.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint manifest: " + std::string(e.what()));
  }
  return ck;
}

// Copies stored values into `params`; names and shapes must match exactly.
inline void assign_parameters(ParamList& params, const Checkpoint& ck) {
  if (params.size() != ck.tensors.size())
    throw ValidationError("checkpoint holds " + std::to_string(ck.tensors.size()) +
                          " tensors, model expects " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& s = ck.tensors[i];
    auto& p = params[i];
    if (s.name != p.name || s.shape != p.tensor.shape())
      throw ValidationError("checkpoint tensor '" + s.name + "' " + shape_str(s.shape) +
                            " does not match model tensor '" + p.name + "' " +
                            shape_str(p.tensor.shape()));
    std::copy(s.values.begin(), s.values.end(), p.tensor.data().begin());
  }
}

}  // namespace ecue::nn
