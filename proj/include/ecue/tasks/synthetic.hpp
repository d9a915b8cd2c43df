#pragma once

// Separable synthetic corpus: each conversation keeps one emotion, its
// utterances contain that class's cue words, and each clip is a tone whose
// pitch and loudness depend on the class.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/audio/wav.hpp"
#include "ecue/binary_io.hpp"
#include "ecue/nn/random.hpp"

namespace ecue::tasks {

struct SyntheticOptions {
  std::size_t conversations = 8;
  std::size_t utterances = 5;
  double seconds = 0.3;
  std::uint64_t seed = 0;
};

struct SyntheticClass {
  const char* label;
  std::vector<const char*> cues;
  double pitch_hz;
  double amplitude;
};

inline const std::vector<SyntheticClass>& synthetic_classes() {
  static const std::vector<SyntheticClass> classes = {
      {"hap", {"sunny", "laugh", "party", "gift"}, 120.0, 0.3},
      {"sad", {"rain", "cry", "alone", "loss"}, 170.0, 0.1},
      {"ang", {"fight", "shout", "unfair", "broken"}, 230.0, 0.6},
      {"neu", {"table", "paper", "schedule", "train"}, 290.0, 0.2},
  };
  return classes;
}

inline const std::vector<const char*>& synthetic_fillers() {
  static const std::vector<const char*> words = {"i",   "think", "the", "was", "today",
                                                 "you", "and",   "it",  "so",  "about"};
  return words;
}

// Triples linking cue words of the same class.
inline std::vector<std::string> synthetic_kb_lines() {
  static const char* rel[] = {"IsA", "HasContext", "Causes"};
  std::vector<std::string> lines;
  for (const auto& c : synthetic_classes())
    for (std::size_t i = 0; i + 1 < c.cues.size(); ++i)
      lines.push_back(std::string(c.cues[i]) + "\t" + rel[i % 3] + "\t" + c.cues[i + 1]);
  return lines;
}

inline audio::Waveform synthetic_tone(double pitch_hz, double amplitude, double seconds,
                                      nn::Rng& rng) {
  audio::Waveform w;
  const auto n = static_cast<std::size_t>(seconds * w.sample_rate);
  const double f = pitch_hz * (1.0 + 0.02 * rng.uniform(-1.0, 1.0));
  const double phase = rng.uniform();
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / w.sample_rate;
    const double x = f * t + phase;
    const double saw = 2.0 * (x - std::floor(x)) - 1.0;
    w.samples[i] = amplitude * (0.6 * saw + 0.4 * std::sin(2.0 * std::numbers::pi * x)) +
                   0.005 * rng.uniform(-1.0, 1.0);
  }
  return w;
}

struct SyntheticPaths {
  std::filesystem::path corpus;
  std::filesystem::path kb;
};

// Writes corpus.jsonl, kb.tsv and audio/*.wav under `dir`. Audio paths in the
// corpus are relative to the corpus file.
inline SyntheticPaths write_synthetic_corpus(const std::filesystem::path& dir,
                                             const SyntheticOptions& opt) {
  require(opt.conversations >= 1 && opt.utterances >= 2, "synthetic corpus too small");
  std::error_code ec;
  std::filesystem::create_directories(dir / "audio", ec);
  if (ec) throw IoError("cannot create " + (dir / "audio").string() + ": " + ec.message());
  const auto& classes = synthetic_classes();
  const auto& fillers = synthetic_fillers();
  nn::Rng rng(opt.seed);
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& c : classes) labels.push_back(c.label);

  std::ostringstream jsonl;
  for (std::size_t ci = 0; ci < opt.conversations; ++ci) {
    const auto& cls = classes[ci % classes.size()];
    const std::string id = "syn" + std::to_string(ci);
    nlohmann::json utts = nlohmann::json::array();
    for (std::size_t u = 0; u < opt.utterances; ++u) {
      std::string text;
      for (int k = 0; k < 5; ++k) {
        if (!text.empty()) text += ' ';
        text += k % 2 == 0 ? fillers[rng.below(fillers.size())] : cls.cues[rng.below(cls.cues.size())];
      }
      text += '.';
      const std::string wav = "audio/" + id + "_" + std::to_string(u) + ".wav";
      audio::write_wav(dir / wav, synthetic_tone(cls.pitch_hz, cls.amplitude, opt.seconds, rng));
      utts.push_back({{"speaker", u % 2 == 0 ? "A" : "B"},
                      {"text", text},
                      {"emotion", cls.label},
                      {"audio", wav}});
    }
    jsonl << nlohmann::json{{"id", id}, {"labels", labels}, {"utterances", utts}}.dump() << '\n';
  }
  SyntheticPaths paths{dir / "corpus.jsonl", dir / "kb.tsv"};
  write_text_file(paths.corpus, jsonl.str());
  std::string kb;
  for (const auto& l : synthetic_kb_lines()) kb += l + "\n";
  write_text_file(paths.kb, kb);
  return paths;
}

}  // namespace ecue::tasks
