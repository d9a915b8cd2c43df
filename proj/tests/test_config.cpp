#include <gtest/gtest.h>

#include "ecue/tasks/config.hpp"
#include "test_support.hpp"

using namespace ecue;
using namespace ecue::tasks;

TEST(Config, Defaults) {
  TrainConfig c;
  EXPECT_EQ(c.task, Task::Epc);
  EXPECT_EQ(c.modality, Modality::TextSpeech);
  EXPECT_EQ(c.lr, 1e-4);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_EQ(c.bridge_len, 4u);
  EXPECT_EQ(c.mfm_blocks, 2u);
  EXPECT_EQ(c.window, 3u);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, JsonRoundTrip) {
  TrainConfig c;
  c.task = Task::Erc;
  c.modality = Modality::Speech;
  c.lr = 3e-3;
  c.epochs = 7;
  c.seed = 99;
  c.mel_tokens = MelTokens::Patch;
  c.no_pe = true;
  c.data = "x.jsonl";
  c.split = "dev";
  TrainConfig d;
  apply_json(d, to_json(c));
  EXPECT_EQ(to_json(d), to_json(c));
  EXPECT_EQ(d.modality, Modality::Speech);
}

TEST(Config, PartialOverlayKeepsOtherFields) {
  TrainConfig c;
  apply_json(c, nlohmann::json::parse(R"({"epochs": 3})"));
  EXPECT_EQ(c.epochs, 3u);
  EXPECT_EQ(c.batch_size, 32u);
  TrainConfig m;
  apply_json(m, nlohmann::json::parse(R"({"command":"train","config":{"model_dim":16}})"));
  EXPECT_EQ(m.model_dim, 16u);
}

TEST(Config, UnknownKeyAndBadValues) {
  TrainConfig c;
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"learning_rate": 1})")), ValidationError);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"epochs": "ten"})")), ValidationError);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"modality": "video"})")), ValidationError);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse("[1,2]")), ValidationError);
}

TEST(Config, Validation) {
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), ValidationError);
  };
  bad([](TrainConfig& c) { c.lr = -1; });
  bad([](TrainConfig& c) { c.batch_size = 0; });
  bad([](TrainConfig& c) { c.model_dim = 10; });
  bad([](TrainConfig& c) { c.bridge_len = 0; });
  bad([](TrainConfig& c) { c.dropout = 1.0; });
  bad([](TrainConfig& c) { c.split = "holdout"; });
}

TEST(Config, FileLoading) {
  test::TempDir dir("config_file");
  const auto ok = dir.write("c.json", R"({"task":"erc","window":5})");
  const auto c = load_config(ok);
  EXPECT_EQ(c.task, Task::Erc);
  EXPECT_EQ(c.window, 5u);
  EXPECT_THROW(load_config(dir.write("bad.json", "{")), ParseError);
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
}

TEST(Config, EnumNames) {
  EXPECT_EQ(to_string(Modality::TextSpeech), "T+S");
  EXPECT_EQ(parse_modality("T"), Modality::Text);
  EXPECT_EQ(parse_modality("S"), Modality::Speech);
  EXPECT_EQ(parse_task("epc"), Task::Epc);
  EXPECT_EQ(parse_mel_tokens("patch"), MelTokens::Patch);
}
