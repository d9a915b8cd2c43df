#include <gtest/gtest.h>

#include <vector>

#include "ecue/tasks/dataset.hpp"
#include "ecue/tasks/synthetic.hpp"
#include "test_support.hpp"

using namespace ecue;
using namespace ecue::tasks;

namespace {

Conversation three_utterances() {
  Conversation c;
  c.id = "c";
  c.label_set = {"hap", "sad"};
  c.utterances = {{0, "movie was long", 0, std::nullopt},
                  {1, "movie asleep", 1, std::nullopt},
                  {0, "sunny day", 0, std::nullopt}};
  return c;
}

audio::AudioFeatures fake_features(std::size_t frames, std::size_t n_mels, double base) {
  audio::AudioFeatures f;
  f.mel.n_frames = frames;
  f.mel.n_mels = n_mels;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t b = 0; b < n_mels; ++b) f.mel.frames.push_back(base + t + 0.1 * b);
    f.prosody.f0.push_back(100.0 + t);
    f.prosody.energy.push_back(0.01 * t);
  }
  return f;
}

}  // namespace

TEST(Vocabulary, SpecialsThenSortedWords) {
  const auto v = Vocabulary::build({three_utterances()});
  ASSERT_EQ(v.size(), 1u + kMaxSpeakerTokens + 6u);
  EXPECT_EQ(v.tokens()[0], "[unk]");
  EXPECT_EQ(v.tokens()[1], "[s1]");
  EXPECT_EQ(v.tokens()[16], "[s16]");
  const std::vector<std::string> words(v.tokens().begin() + 17, v.tokens().end());
  EXPECT_EQ(words, (std::vector<std::string>{"asleep", "day", "long", "movie", "sunny", "was"}));
  EXPECT_EQ(v.id("zebra"), 0u);
  EXPECT_EQ(v.id("[s2]"), 2u);
  EXPECT_EQ(Vocabulary::from_tokens(v.tokens()).tokens(), v.tokens());
  EXPECT_THROW((Vocabulary::from_tokens({"a", "b"})), ValidationError);
}

TEST(PrepareText, UnitScoresFromImportance) {
  KnowledgeBase kb;
  kb.add({"asleep", RelationKind::HasContext, "movie"});
  const auto lex = default_function_lexicon();
  const auto vocab = Vocabulary::build({three_utterances()});
  FeatureContext ctx;
  ctx.kb = &kb;
  ctx.lexicon = &lex;
  ctx.vocab = &vocab;
  const std::vector<std::string> toks = {"[s1]", "movie", "was", "long", "[s2]", "movie", "asleep"};
  const auto t = prepare_text(toks, ctx);
  // Words: movie, was, long, movie, asleep (K = 5).
  // movie rows: one recurrence + one relation to asleep -> 2/5.
  // asleep row: relation to both movies -> 2/5. "was" is a function word.
  const std::vector<double> expect = {0.0, 0.4, 0.0, 0.0, 0.0, 0.4, 0.4};
  ASSERT_EQ(t.unit_scores.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(t.unit_scores[i], expect[i]) << i;
  EXPECT_EQ(t.unit_is_word, (std::vector<bool>{false, true, true, true, false, true, true}));
  for (std::size_t i = 0; i < toks.size(); ++i) {
    EXPECT_EQ(t.unit_tokens[i], std::vector<std::size_t>{i});
    EXPECT_EQ(t.token_ids[i], vocab.id(toks[i]));
  }
}

TEST(PrepareText, NoKnowledgeBaseMeansRecurrenceOnly) {
  const auto lex = default_function_lexicon();
  const auto vocab = Vocabulary::build({three_utterances()});
  FeatureContext ctx;
  ctx.lexicon = &lex;
  ctx.vocab = &vocab;
  const auto t = prepare_text({"[s1]", "movie", "asleep", "[s2]", "movie"}, ctx);
  EXPECT_DOUBLE_EQ(t.unit_scores[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.unit_scores[2], 0.0);
  EXPECT_DOUBLE_EQ(t.unit_scores[4], 1.0 / 3.0);
}

TEST(PoolAudio, GroupsAndNormalizes) {
  const auto a = fake_features(3, 2, -10.0), b = fake_features(2, 2, 0.0);
  const auto p = pool_audio({&a, &b}, 2, 2);
  // Concatenated log-mel band 0: -10, -9, -8, 0, 1. Normalized: (x + 10) / 10.
  ASSERT_EQ(p.frames, 3u);
  EXPECT_DOUBLE_EQ(p.mel[0 * 2 + 0], 0.05);
  EXPECT_DOUBLE_EQ(p.mel[1 * 2 + 0], 0.6);
  EXPECT_DOUBLE_EQ(p.mel[2 * 2 + 0], 1.1);
  EXPECT_DOUBLE_EQ(p.mel[2 * 2 + 1], 1.11);
  EXPECT_DOUBLE_EQ(p.f0[0], 100.5);
  EXPECT_DOUBLE_EQ(p.f0[1], (102.0 + 100.0) / 2.0);
  EXPECT_DOUBLE_EQ(p.f0[2], 101.0);
  EXPECT_DOUBLE_EQ(p.energy[2], 0.01);
  const auto one = pool_audio({&a}, 2, 1);
  EXPECT_EQ(one.frames, 3u);
  EXPECT_DOUBLE_EQ(one.mel[5], 0.21);
  EXPECT_THROW(pool_audio({&a}, 3, 1), ContractViolation);
}

TEST(PrepareEpc, TargetNeverLeaksIntoInput) {
  test::TempDir dir("features_leak");
  SyntheticOptions opt;
  opt.conversations = 1;
  opt.utterances = 5;
  opt.seconds = 0.2;
  const auto paths = write_synthetic_corpus(dir.path(), opt);
  const auto corpus = load_conversations(paths.corpus);
  Resources res = load_resources(TrainConfig{});
  const auto vocab = Vocabulary::build(corpus);
  FeatureContext ctx{&res.kb, &res.lexicon, &vocab, &res.audio, 4, true, true};

  const auto& conv = corpus.front();
  const auto base = prepare_corpus({conv}, Task::Epc, 3, ctx);
  ASSERT_EQ(base.size(), 4u);
  for (std::size_t k = 0; k < base.size(); ++k) {
    const std::size_t target = k + 1;
    auto mutated = conv;
    mutated.utterances[target].text = "completely different words here";
    mutated.utterances[target].emotion = (conv.utterances[target].emotion + 1) % 4;
    mutated.utterances[target].audio_path = conv.utterances[0].audio_path;
    const auto inst = build_epc_instances(mutated, 3)[k];
    const auto again = prepare_epc(mutated, inst, ctx);
    EXPECT_EQ(again.input.text.tokens, base[k].input.text.tokens);
    EXPECT_EQ(again.input.text.unit_scores, base[k].input.text.unit_scores);
    EXPECT_EQ(again.input.audio.mel, base[k].input.audio.mel);
    EXPECT_EQ(again.input.audio.f0, base[k].input.audio.f0);
  }
  // Input ends with the target speaker's token.
  EXPECT_EQ(base[0].input.text.tokens.back(), "[s2]");
  EXPECT_EQ(base[0].id, conv.id + "#1");
}

TEST(PrepareEpc, MissingAudioIsValidationError) {
  const auto lex = default_function_lexicon();
  const auto conv = three_utterances();
  const auto vocab = Vocabulary::build({conv});
  AudioCache cache;
  FeatureContext ctx{nullptr, &lex, &vocab, &cache, 4, true, true};
  EXPECT_THROW(prepare_corpus({conv}, Task::Epc, 3, ctx), ValidationError);
  ctx.need_audio = false;
  EXPECT_EQ(prepare_corpus({conv}, Task::Epc, 3, ctx).size(), 2u);
  EXPECT_EQ(prepare_corpus({conv}, Task::Erc, 3, ctx).size(), 3u);
}

TEST(Dataset, LabelSetsMustAgree) {
  auto a = three_utterances(), b = three_utterances();
  b.id = "d";
  b.label_set = {"sad", "hap"};
  EXPECT_THROW((corpus_labels({a, b})), ValidationError);
  EXPECT_EQ((corpus_labels({a, a})), a.label_set);
  EXPECT_THROW(corpus_labels({}), ValidationError);
}
