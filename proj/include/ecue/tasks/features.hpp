#pragma once

// Turns EPC/ERC instances into model inputs: token ids with per-unit word
// spans and importance scores for the text side, pooled mel and prosody
// frames for the audio side.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ecue/audio/featurize.hpp"
#include "ecue/corpus.hpp"
#include "ecue/kwrt.hpp"
#include "ecue/tasks/config.hpp"

namespace ecue::tasks {

inline constexpr std::size_t kMaxSpeakerTokens = 16;
inline constexpr const char* kUnknownToken = "[unk]";
// Normalized mel value = (log-mel + kMelShift) / kMelScale.
inline constexpr double kMelShift = 10.0;
inline constexpr double kMelScale = 10.0;

class Vocabulary {
 public:
  Vocabulary() { reset({}); }

  // Specials first ([unk], [s1]..[s16]), then words in lexicographic order.
  static Vocabulary build(const std::vector<Conversation>& corpus) {
    std::set<std::string> words;
    for (const auto& c : corpus)
      for (const auto& u : c.utterances)
        for (auto& w : tokenize(u.text)) words.insert(std::move(w));
    Vocabulary v;
    v.reset({words.begin(), words.end()});
    return v;
  }

  static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
    Vocabulary v;
    v.tokens_ = tokens;
    v.index_.clear();
    for (std::size_t i = 0; i < tokens.size(); ++i) v.index_.emplace(tokens[i], i);
    if (!v.index_.contains(kUnknownToken))
      throw ValidationError("vocabulary lacks the unknown token");
    return v;
  }

  std::size_t id(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? index_.at(kUnknownToken) : it->second;
  }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  void reset(const std::vector<std::string>& words) {
    tokens_ = {kUnknownToken};
    for (std::size_t s = 1; s <= kMaxSpeakerTokens; ++s) tokens_.push_back(speaker_token(s));
    for (const auto& w : words)
      if (!is_speaker_token(w) && w != kUnknownToken) tokens_.push_back(w);
    index_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// A text unit is either a word (pooled over its token span) or a speaker
// token. Speaker units carry score 0.
struct TextInput {
  std::vector<std::size_t> token_ids;
  std::vector<std::vector<std::size_t>> unit_tokens;
  std::vector<double> unit_scores;
  std::vector<bool> unit_is_word;
  std::vector<std::string> tokens;  // rendered sequence, for inspection
};

// Row-major frames x n_mels, already normalized and pooled.
struct AudioInput {
  std::size_t frames = 0;
  std::size_t n_mels = 0;
  std::vector<double> mel;
  std::vector<double> f0;
  std::vector<double> energy;
};

struct ModelInput {
  TextInput text;
  AudioInput audio;
};

struct PreparedInstance {
  std::string id;
  std::size_t label = 0;
  ModelInput input;
};

// Memoizes per-file audio features.
class AudioCache {
 public:
  explicit AudioCache(audio::AudioConfig cfg = {}) : cfg_(cfg) {}
  const audio::AudioFeatures& get(const std::filesystem::path& path) {
    const auto key = path.lexically_normal().string();
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, audio::extract_features(audio::read_wav(path, cfg_.sample_rate), cfg_)).first;
    return it->second;
  }
  const audio::AudioConfig& config() const { return cfg_; }

 private:
  audio::AudioConfig cfg_;
  std::map<std::string, audio::AudioFeatures> cache_;
};

struct FeatureContext {
  const KnowledgeBase* kb = nullptr;  // null = empty knowledge base
  const FunctionLexicon* lexicon = nullptr;
  const Vocabulary* vocab = nullptr;
  AudioCache* audio = nullptr;
  std::size_t audio_pool = 4;
  bool need_text = true;
  bool need_audio = true;
};

inline TextInput prepare_text(const std::vector<std::string>& tokens, const FeatureContext& ctx) {
  require(ctx.vocab && ctx.lexicon, "prepare_text: vocabulary and lexicon required");
  static const KnowledgeBase empty_kb;
  const KnowledgeBase& kb = ctx.kb ? *ctx.kb : empty_kb;
  TextInput t;
  t.tokens = tokens;
  for (const auto& tok : tokens) t.token_ids.push_back(ctx.vocab->id(tok));
  const auto words = classify_words(tokens, *ctx.lexicon);
  const auto scores = squeeze_importance(build_importance(words, kb)).scores;
  std::size_t w = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (w < words.size() && words[w].token_begin == i) {
      std::vector<std::size_t> span;
      for (auto k = words[w].token_begin; k < words[w].token_end; ++k) span.push_back(k);
      t.unit_tokens.push_back(std::move(span));
      t.unit_scores.push_back(scores[w]);
      t.unit_is_word.push_back(true);
      i = words[w].token_end - 1;
      ++w;
    } else {
      t.unit_tokens.push_back({i});
      t.unit_scores.push_back(0.0);
      t.unit_is_word.push_back(false);
    }
  }
  return t;
}

// Concatenates per-utterance features, averages groups of `pool` frames and
// normalizes the log-mel values.
inline AudioInput pool_audio(const std::vector<const audio::AudioFeatures*>& parts,
                             std::size_t n_mels, std::size_t pool) {
  require(pool >= 1, "pool_audio: pool must be >= 1");
  std::vector<double> mel, f0, energy;
  std::size_t frames = 0;
  for (const auto* f : parts) {
    require(f->mel.n_mels == n_mels, "pool_audio: mel band count mismatch");
    mel.insert(mel.end(), f->mel.frames.begin(), f->mel.frames.end());
    f0.insert(f0.end(), f->prosody.f0.begin(), f->prosody.f0.end());
    energy.insert(energy.end(), f->prosody.energy.begin(), f->prosody.energy.end());
    frames += f->mel.n_frames;
  }
  AudioInput a;
  a.n_mels = n_mels;
  a.frames = (frames + pool - 1) / pool;
  a.mel.assign(a.frames * n_mels, 0.0);
  a.f0.assign(a.frames, 0.0);
  a.energy.assign(a.frames, 0.0);
  for (std::size_t g = 0; g < a.frames; ++g) {
    const std::size_t begin = g * pool, end = std::min(frames, begin + pool);
    const double w = 1.0 / static_cast<double>(end - begin);
    for (std::size_t t = begin; t < end; ++t) {
      for (std::size_t b = 0; b < n_mels; ++b)
        a.mel[g * n_mels + b] += w * (mel[t * n_mels + b] + kMelShift) / kMelScale;
      a.f0[g] += w * f0[t];
      a.energy[g] += w * energy[t];
    }
  }
  return a;
}

inline AudioInput prepare_audio(const std::vector<Utterance>& utts, const FeatureContext& ctx) {
  require(ctx.audio != nullptr, "prepare_audio: audio cache required");
  std::vector<const audio::AudioFeatures*> parts;
  for (const auto& u : utts) {
    if (!u.audio_path)
      throw ValidationError("utterance \"" + u.text.substr(0, 40) +
                            "\" has no audio but the modality needs it");
    parts.push_back(&ctx.audio->get(*u.audio_path));
  }
  return pool_audio(parts, ctx.audio->config().n_mels, ctx.audio_pool);
}

inline ModelInput prepare_input(const std::vector<Utterance>& utts,
                                std::vector<std::string> tokens, const FeatureContext& ctx) {
  ModelInput in;
  if (ctx.need_text) in.text = prepare_text(tokens, ctx);
  if (ctx.need_audio) in.audio = prepare_audio(utts, ctx);
  return in;
}

// History tokens followed by the target speaker's token. Only the history
// utterances are read.
inline std::vector<std::string> epc_tokens(const EpcInstance& inst) {
  auto tokens = render_speaker_sequence(inst.history);
  SpeakerOrdinals ordinals(inst.history);
  tokens.push_back(speaker_token(ordinals.ordinal_of(inst.target_speaker)));
  return tokens;
}

inline PreparedInstance prepare_epc(const Conversation& conv, const EpcInstance& inst,
                                    const FeatureContext& ctx) {
  return {conv.id + "#" + std::to_string(inst.target_position), inst.target_label,
          prepare_input(inst.history, epc_tokens(inst), ctx)};
}

inline PreparedInstance prepare_erc(const Conversation& conv, const ErcInstance& inst,
                                    const FeatureContext& ctx) {
  return {conv.id + "#" + std::to_string(inst.source_position), inst.target_label,
          prepare_input(inst.context, render_speaker_sequence(inst.context), ctx)};
}

inline std::vector<PreparedInstance> prepare_corpus(const std::vector<Conversation>& corpus,
                                                    Task task, std::size_t window,
                                                    const FeatureContext& ctx) {
  std::vector<PreparedInstance> out;
  for (const auto& conv : corpus) {
    if (task == Task::Epc) {
      for (const auto& inst : build_epc_instances(conv, window))
        out.push_back(prepare_epc(conv, inst, ctx));
    } else {
      for (const auto& inst : build_erc_instances(conv, window))
        out.push_back(prepare_erc(conv, inst, ctx));
    }
  }
  return out;
}

}  // namespace ecue::tasks
