#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "ecue/tasks/dataset.hpp"
#include "ecue/tasks/model.hpp"
#include "ecue/tasks/synthetic.hpp"
#include "test_support.hpp"

using namespace ecue;
using namespace ecue::tasks;

namespace {

TrainConfig tiny_config(Modality m) {
  TrainConfig c;
  c.modality = m;
  c.model_dim = 8;
  c.n_heads = 2;
  c.text_layers = 1;
  c.audio_layers = 1;
  c.prosody_layers = 1;
  c.mfm_blocks = 2;
  return c;
}

// One synthetic corpus shared by every test in this file.
class ModelTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<test::TempDir>("model");
    SyntheticOptions opt;
    opt.conversations = 2;
    opt.utterances = 3;
    opt.seconds = 0.25;
    const auto paths = write_synthetic_corpus(dir_->path(), opt);
    corpus_ = load_conversations(paths.corpus);
    vocab_ = Vocabulary::build(corpus_);
    res_ = std::make_unique<Resources>(load_resources(TrainConfig{}));
    data_ = build_dataset(corpus_, tiny_config(Modality::TextSpeech), vocab_, *res_);
  }
  static void TearDownTestSuite() {
    res_.reset();
    dir_.reset();
  }

  static EmotionModel make(const TrainConfig& c, std::uint64_t seed = 1) {
    return EmotionModel::init(ModelConfig::from(c, vocab_.size(), 4), seed);
  }

  static inline std::unique_ptr<test::TempDir> dir_;
  static inline std::vector<Conversation> corpus_;
  static inline Vocabulary vocab_;
  static inline std::unique_ptr<Resources> res_;
  static inline Dataset data_;
};

std::size_t count(const nn::ParamList& ps) { return nn::parameter_count(ps); }

}  // namespace

TEST_F(ModelTest, LogitShapesPerModality) {
  for (auto m : {Modality::Text, Modality::Speech, Modality::TextSpeech}) {
    const auto model = make(tiny_config(m));
    for (const auto& inst : data_.instances) {
      const auto l = model.forward(inst.input);
      EXPECT_EQ(l.averaged.size(), 4u) << to_string(m);
      for (double v : l.averaged.data()) EXPECT_TRUE(std::isfinite(v));
    }
  }
}

TEST_F(ModelTest, TraceShapes) {
  const auto cfg = tiny_config(Modality::TextSpeech);
  const auto model = make(cfg);
  const auto& in = data_.instances[1].input;
  ForwardTrace tr;
  model.forward(in, {}, &tr);
  EXPECT_EQ(tr.h_t.rows(), in.text.token_ids.size());
  EXPECT_EQ(tr.f_t.rows(), in.text.unit_scores.size());
  EXPECT_EQ(tr.h_a.rows(), in.audio.frames);
  EXPECT_EQ(tr.f_a.rows(), in.audio.frames);
  EXPECT_EQ(tr.f_ta.rows(), in.audio.frames);
  EXPECT_EQ(tr.f_ta.cols(), 8u);
  EXPECT_EQ(tr.f_m.rows(), in.audio.frames);
  ASSERT_TRUE(tr.fused.has_value());
  EXPECT_EQ(tr.fused->f_m_to_ta.rows(), in.audio.frames + cfg.bridge_len);
  EXPECT_EQ(tr.fused->f_ta_to_m.rows(), in.audio.frames + cfg.bridge_len);
}

TEST_F(ModelTest, PatchTokens) {
  auto cfg = tiny_config(Modality::TextSpeech);
  cfg.mel_tokens = MelTokens::Patch;
  const auto model = make(cfg);
  const auto& in = data_.instances[0].input;
  ForwardTrace tr;
  const auto l = model.forward(in, {}, &tr);
  EXPECT_EQ(tr.f_m.rows(), (in.audio.frames + 3) / 4 * (80 / 16));
  EXPECT_EQ(tr.f_m.cols(), 8u);
  EXPECT_EQ(l.averaged.size(), 4u);
}

TEST_F(ModelTest, AblationParameterCounts) {
  const auto full_cfg = tiny_config(Modality::TextSpeech);
  const auto full = make(full_cfg).parameter_count();

  auto c = full_cfg;
  c.no_kwrt = true;
  EXPECT_EQ(make(c).parameter_count(), full - 2);

  nn::Rng rng(0);
  nn::ParamList pe;
  audio::ProsodyEncoderParams::init(8, 2, 1, rng).collect("p", pe);
  c = full_cfg;
  c.no_pe = true;
  EXPECT_EQ(make(c).parameter_count(), full - count(pe));

  // Without the bridge module: mel projection, blocks and dual heads go,
  // a single head comes in.
  nn::ParamList removed, added;
  nn::Linear::init(80, 8, rng).collect("mel", removed);
  for (int b = 0; b < 2; ++b) fusion::MfmBlock::init(8, 8, 2, 4, 1, rng).collect("b", removed);
  fusion::ClassifierHeads::init(8, 8, 4, rng).collect("h", removed);
  nn::Linear::init(8, 4, rng).collect("s", added);
  c = full_cfg;
  c.no_tmf = true;
  EXPECT_EQ(make(c).parameter_count(), full - count(removed) + count(added));
}

TEST_F(ModelTest, ParameterNamesAreUnique) {
  const auto ps = make(tiny_config(Modality::TextSpeech)).parameters();
  std::set<std::string> names;
  for (const auto& p : ps) EXPECT_TRUE(names.insert(p.name).second) << p.name;
}

TEST_F(ModelTest, SeedDeterminesInitialization) {
  const auto cfg = tiny_config(Modality::TextSpeech);
  const auto a = make(cfg, 5).parameters(), b = make(cfg, 5).parameters(), d = make(cfg, 6).parameters();
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].tensor.values(), b[i].tensor.values()) << a[i].name;
    differs = differs || a[i].tensor.values() != d[i].tensor.values();
  }
  EXPECT_TRUE(differs);
  const auto& in = data_.instances[0].input;
  EXPECT_EQ(make(cfg, 5).forward(in).averaged.values(), make(cfg, 5).forward(in).averaged.values());
}

TEST_F(ModelTest, KwrtScalingReachesLogits) {
  auto cfg = tiny_config(Modality::Text);
  auto model = make(cfg);
  const auto& in = data_.instances[2].input;
  ForwardTrace tr;
  model.forward(in, {}, &tr);
  nn::ParamList ps = model.parameters();
  nn::Tensor w, b;
  for (auto& p : ps) {
    if (p.name == "kwrt.weight") w = p.tensor;
    if (p.name == "kwrt.bias") b = p.tensor;
  }
  ASSERT_TRUE(w.defined() && b.defined());
  // f_t row u = h_unit(u) * (w * score(u) + b); word units pool a single token.
  for (std::size_t u = 0; u < in.text.unit_scores.size(); ++u) {
    const double g = w.data()[0] * in.text.unit_scores[u] + b.data()[0];
    const std::size_t tok = in.text.unit_tokens[u][0];
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(tr.f_t.at(u, j), tr.h_t.at(tok, j) * g, 1e-12);
  }
}

TEST_F(ModelTest, MelBandMismatchIsRejected) {
  const auto model = make(tiny_config(Modality::Speech));
  auto in = data_.instances[0].input;
  in.audio.n_mels = 40;
  EXPECT_THROW(model.forward(in), ContractViolation);
}
