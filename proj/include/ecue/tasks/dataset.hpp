#pragma once

// Loads a corpus named by a TrainConfig and prepares model inputs.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecue/corpus.hpp"
#include "ecue/knowledge.hpp"
#include "ecue/kwrt.hpp"
#include "ecue/tasks/config.hpp"
#include "ecue/tasks/features.hpp"

namespace ecue::tasks {

struct Dataset {
  std::vector<std::string> labels;
  std::vector<PreparedInstance> instances;
};

// Shared label set of a corpus; every conversation must declare the same one.
inline std::vector<std::string> corpus_labels(const std::vector<Conversation>& corpus) {
  if (corpus.empty()) throw ValidationError("corpus has no conversations");
  for (const auto& c : corpus)
    if (c.label_set != corpus.front().label_set)
      throw ValidationError("conversation " + c.id + " declares a different label set than " +
                            corpus.front().id);
  return corpus.front().label_set;
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split '" + s + "'");
}

// Resources a run needs besides the corpus itself.
struct Resources {
  KnowledgeBase kb;
  FunctionLexicon lexicon;
  AudioCache audio;
};

inline Resources load_resources(const TrainConfig& cfg) {
  Resources r{KnowledgeBase{}, default_function_lexicon(), AudioCache{}};
  if (!cfg.kb.empty()) r.kb = load_kb(cfg.kb);
  if (!cfg.lexicon.empty()) r.lexicon = load_function_lexicon(cfg.lexicon);
  return r;
}

inline std::vector<Conversation> load_corpus(const TrainConfig& cfg) {
  if (cfg.data.empty()) throw ValidationError("no data file given");
  auto corpus = load_conversations(cfg.data);
  if (cfg.split != "all") corpus = select_split(corpus, parse_split(cfg.split), cfg.split_seed);
  return corpus;
}

inline Dataset build_dataset(const std::vector<Conversation>& corpus, const TrainConfig& cfg,
                             const Vocabulary& vocab, Resources& res) {
  FeatureContext ctx;
  ctx.kb = &res.kb;
  ctx.lexicon = &res.lexicon;
  ctx.vocab = &vocab;
  ctx.audio = &res.audio;
  ctx.audio_pool = cfg.audio_pool;
  ctx.need_text = cfg.uses_text();
  ctx.need_audio = cfg.uses_audio();
  Dataset d;
  d.labels = corpus_labels(corpus);
  d.instances = prepare_corpus(corpus, cfg.task, cfg.window, ctx);
  if (d.instances.empty())
    throw ValidationError("corpus yields no " + to_string(cfg.task) + " instances");
  return d;
}

}  // namespace ecue::tasks
