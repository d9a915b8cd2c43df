#pragma once

// Feature dump: JSON manifest + little-endian f32 blob holding the mel
// frames (T x n_mels), then f0 (T), then energy (T).

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/audio/mel.hpp"
#include "ecue/audio/prosody.hpp"
#include "ecue/binary_io.hpp"

namespace ecue::audio {

struct AudioFeatures {
  MelSpectrogram mel;
  ProsodyFrames prosody;
};

inline AudioFeatures extract_features(const Waveform& w, const AudioConfig& cfg = {}) {
  return {mel_spectrogram(w, cfg), prosody_features(w, cfg)};
}

inline void write_features(const std::filesystem::path& manifest_path,
                           const AudioFeatures& f, const AudioConfig& cfg,
                           const std::string& source = {}) {
  std::vector<unsigned char> blob;
  auto blob_path = manifest_path;
  blob_path.replace_extension(".bin");
  const std::size_t t = f.mel.n_frames;
  nlohmann::json arrays = nlohmann::json::array();
  arrays.push_back({{"name", "mel"}, {"shape", {t, f.mel.n_mels}}, {"offset", blob.size()}});
  append_f32_le(blob, f.mel.frames);
  arrays.push_back({{"name", "f0"}, {"shape", {t}}, {"offset", blob.size()}});
  append_f32_le(blob, f.prosody.f0);
  arrays.push_back({{"name", "energy"}, {"shape", {t}}, {"offset", blob.size()}});
  append_f32_le(blob, f.prosody.energy);
  nlohmann::json manifest = {
      {"source", source},
      {"sample_rate", cfg.sample_rate},
      {"window_s", cfg.window_s},
      {"hop_s", cfg.hop_s},
      {"fft_size", cfg.fft_size},
      {"n_mels", f.mel.n_mels},
      {"n_frames", t},
      {"log_floor", cfg.log_floor},
      {"dtype", "f32"},
      {"endianness", "little"},
      {"blob", blob_path.filename().string()},
      {"arrays", arrays}};
  write_file(blob_path, blob);
  write_text_file(manifest_path, manifest.dump(2) + "\n");
}

inline AudioFeatures read_features(const std::filesystem::path& manifest_path) {
  const auto manifest = nlohmann::json::parse(read_text_file(manifest_path));
  const auto blob = read_file(manifest_path.parent_path() / manifest.at("blob").get<std::string>());
  AudioFeatures f;
  f.mel.n_frames = manifest.at("n_frames").get<std::size_t>();
  f.mel.n_mels = manifest.at("n_mels").get<std::size_t>();
  f.mel.frame_hop = manifest.at("hop_s").get<double>();
  f.mel.window = manifest.at("window_s").get<double>();
  for (const auto& a : manifest.at("arrays")) {
    const auto name = a.at("name").get<std::string>();
    std::size_t count = 1;
    for (auto d : a.at("shape")) count *= d.get<std::size_t>();
    auto values = read_f32_le(blob, a.at("offset").get<std::size_t>(), count);
    if (name == "mel") f.mel.frames = std::move(values);
    else if (name == "f0") f.prosody.f0 = std::move(values);
    else if (name == "energy") f.prosody.energy = std::move(values);
  }
  return f;
}

}  // namespace ecue::audio
