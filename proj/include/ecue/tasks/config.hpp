#pragma once

// Run configuration. Serialized as a flat JSON object whose keys mirror the
// field names; unknown keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ecue/binary_io.hpp"
#include "ecue/error.hpp"

namespace ecue::tasks {

enum class Task { Epc, Erc };
enum class Modality { Text, Speech, TextSpeech };
enum class MelTokens { Frame, Patch };

inline std::string to_string(Task t) { return t == Task::Epc ? "epc" : "erc"; }
inline std::string to_string(Modality m) {
  switch (m) {
    case Modality::Text: return "T";
    case Modality::Speech: return "S";
    case Modality::TextSpeech: return "T+S";
  }
  return "?";
}
inline std::string to_string(MelTokens m) { return m == MelTokens::Frame ? "frame" : "patch"; }

inline Task parse_task(const std::string& s) {
  if (s == "epc" || s == "EPC") return Task::Epc;
  if (s == "erc" || s == "ERC") return Task::Erc;
  throw ValidationError("unknown task '" + s + "' (expected epc or erc)");
}
inline Modality parse_modality(const std::string& s) {
  if (s == "T" || s == "t" || s == "text") return Modality::Text;
  if (s == "S" || s == "s" || s == "speech") return Modality::Speech;
  if (s == "T+S" || s == "t+s" || s == "text+speech") return Modality::TextSpeech;
  throw ValidationError("unknown modality '" + s + "' (expected T, S or T+S)");
}
inline MelTokens parse_mel_tokens(const std::string& s) {
  if (s == "frame") return MelTokens::Frame;
  if (s == "patch") return MelTokens::Patch;
  throw ValidationError("unknown mel token mode '" + s + "' (expected frame or patch)");
}

struct TrainConfig {
  Task task = Task::Epc;
  Modality modality = Modality::TextSpeech;
  // Optimizer defaults follow the reference setup: Adam, lr 1e-4, batch 32.
  double lr = 1e-4;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  // Desk-scale model; the reference setup uses 1024 dims and 8 heads.
  std::size_t model_dim = 64;
  std::size_t n_heads = 4;
  std::size_t text_layers = 2;
  std::size_t audio_layers = 2;
  std::size_t prosody_layers = 1;
  std::size_t mfm_blocks = 2;
  std::size_t bridge_len = 4;
  std::size_t mlp_depth = 1;
  std::size_t window = 3;
  double dropout = 0.0;
  std::size_t audio_pool = 4;  // mel frames averaged into one audio token
  MelTokens mel_tokens = MelTokens::Frame;
  std::size_t patch_frames = 4;
  std::size_t patch_mels = 16;
  bool no_kwrt = false;
  bool no_pe = false;
  bool no_tmf = false;
  // Stop once an epoch ends with every training instance classified right.
  bool stop_at_full_train_accuracy = false;
  std::string data;     // conversation JSONL
  std::string kb;       // relation TSV; empty = no relations
  std::string lexicon;  // function-word list; empty = built-in list
  std::string split = "all";  // all | train | dev | test
  std::uint64_t split_seed = 0;

  bool uses_text() const { return modality != Modality::Speech; }
  bool uses_audio() const { return modality != Modality::Text; }
};

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"task", to_string(c.task)},
          {"modality", to_string(c.modality)},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"model_dim", c.model_dim},
          {"n_heads", c.n_heads},
          {"text_layers", c.text_layers},
          {"audio_layers", c.audio_layers},
          {"prosody_layers", c.prosody_layers},
          {"mfm_blocks", c.mfm_blocks},
          {"bridge_len", c.bridge_len},
          {"mlp_depth", c.mlp_depth},
          {"window", c.window},
          {"dropout", c.dropout},
          {"audio_pool", c.audio_pool},
          {"mel_tokens", to_string(c.mel_tokens)},
          {"patch_frames", c.patch_frames},
          {"patch_mels", c.patch_mels},
          {"no_kwrt", c.no_kwrt},
          {"no_pe", c.no_pe},
          {"no_tmf", c.no_tmf},
          {"stop_at_full_train_accuracy", c.stop_at_full_train_accuracy},
          {"data", c.data},
          {"kb", c.kb},
          {"lexicon", c.lexicon},
          {"split", c.split},
          {"split_seed", c.split_seed}};
}

// Overlays the keys present in `j` onto `c`. Accepts either a flat object or
// a run manifest carrying the flat object under "config".
inline void apply_json(TrainConfig& c, const nlohmann::json& j_in) {
  const nlohmann::json& j = j_in.contains("config") ? j_in.at("config") : j_in;
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "task") c.task = parse_task(v.get<std::string>());
      else if (key == "modality") c.modality = parse_modality(v.get<std::string>());
      else if (key == "lr") c.lr = v.get<double>();
      else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "epochs") c.epochs = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "model_dim") c.model_dim = v.get<std::size_t>();
      else if (key == "n_heads") c.n_heads = v.get<std::size_t>();
      else if (key == "text_layers") c.text_layers = v.get<std::size_t>();
      else if (key == "audio_layers") c.audio_layers = v.get<std::size_t>();
      else if (key == "prosody_layers") c.prosody_layers = v.get<std::size_t>();
      else if (key == "mfm_blocks") c.mfm_blocks = v.get<std::size_t>();
      else if (key == "bridge_len") c.bridge_len = v.get<std::size_t>();
      else if (key == "mlp_depth") c.mlp_depth = v.get<std::size_t>();
      else if (key == "window") c.window = v.get<std::size_t>();
      else if (key == "dropout") c.dropout = v.get<double>();
      else if (key == "audio_pool") c.audio_pool = v.get<std::size_t>();
      else if (key == "mel_tokens") c.mel_tokens = parse_mel_tokens(v.get<std::string>());
      else if (key == "patch_frames") c.patch_frames = v.get<std::size_t>();
      else if (key == "patch_mels") c.patch_mels = v.get<std::size_t>();
      else if (key == "no_kwrt") c.no_kwrt = v.get<bool>();
      else if (key == "no_pe") c.no_pe = v.get<bool>();
      else if (key == "no_tmf") c.no_tmf = v.get<bool>();
      else if (key == "stop_at_full_train_accuracy") c.stop_at_full_train_accuracy = v.get<bool>();
      else if (key == "data") c.data = v.get<std::string>();
      else if (key == "kb") c.kb = v.get<std::string>();
      else if (key == "lexicon") c.lexicon = v.get<std::string>();
      else if (key == "split") c.split = v.get<std::string>();
      else if (key == "split_seed") c.split_seed = v.get<std::uint64_t>();
      else throw ValidationError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
}

inline void validate(const TrainConfig& c) {
  if (c.lr < 0.0) throw ValidationError("lr must be >= 0");
  if (c.batch_size == 0) throw ValidationError("batch_size must be >= 1");
  if (c.window == 0) throw ValidationError("window must be >= 1");
  if (c.n_heads == 0 || c.model_dim % c.n_heads != 0)
    throw ValidationError("model_dim must be divisible by n_heads");
  if (c.bridge_len == 0) throw ValidationError("bridge_len must be >= 1");
  if (c.mfm_blocks == 0) throw ValidationError("mfm_blocks must be >= 1");
  if (c.mlp_depth == 0) throw ValidationError("mlp_depth must be >= 1");
  if (c.audio_pool == 0) throw ValidationError("audio_pool must be >= 1");
  if (c.dropout < 0.0 || c.dropout >= 1.0) throw ValidationError("dropout must be in [0, 1)");
  if (c.mel_tokens == MelTokens::Patch && (c.patch_frames == 0 || c.patch_mels == 0))
    throw ValidationError("patch sizes must be >= 1");
  if (c.split != "all" && c.split != "train" && c.split != "dev" && c.split != "test")
    throw ValidationError("split must be one of all, train, dev, test");
}

inline TrainConfig load_config(const std::filesystem::path& path) {
  TrainConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  apply_json(c, j);
  return c;
}

}  // namespace ecue::tasks
