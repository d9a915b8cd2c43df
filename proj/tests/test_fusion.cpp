#include <gtest/gtest.h>

#include <vector>

#include "ecue/fusion.hpp"
#include "ecue/nn/grad_check.hpp"
#include "ecue/tasks/gradient_suite.hpp"

using namespace ecue;
using namespace ecue::fusion;
using nn::Tensor;

namespace {

Tensor random_matrix(std::size_t r, std::size_t c, nn::Rng& rng, bool grad = false) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.normal();
  return Tensor::matrix(r, c, std::move(v), grad);
}

void zero_layer(nn::TransformerLayer& t) {
  nn::ParamList ps;
  t.attention.collect("a", ps);
  t.ff_in.collect("i", ps);
  t.ff_out.collect("o", ps);
  nn::fill(ps, 0.0);
}

void zero_mlps(MfmBlock& b) {
  nn::ParamList ps;
  b.mlp_v_to_l.collect("vl", ps);
  b.mlp_l_to_v.collect("lv", ps);
  nn::fill(ps, 0.0);
}

}  // namespace

TEST(InitialFusion, SingleTextVector) {
  nn::Rng rng(1);
  auto p = InitialFusionParams::init(8, 2, rng);
  auto f_t = random_matrix(1, 8, rng), f_a = random_matrix(5, 8, rng);
  const auto out = initial_fusion(f_t, f_a, p);
  ASSERT_EQ(out.rows(), 5u);
  // Softmax over one key: every query receives the same attended vector.
  const auto attended = p.cross.output(p.cross.value(f_t));
  const auto expect = p.norm(nn::add(f_a, nn::concat_rows({attended, attended, attended, attended, attended})));
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out.data()[i], expect.data()[i], 1e-12);
}

TEST(InitialFusion, OutputLengthFollowsAudio) {
  nn::Rng rng(2);
  auto p = InitialFusionParams::init(8, 4, rng);
  for (std::size_t k : {1u, 3u, 9u})
    for (std::size_t t : {1u, 4u, 7u}) {
      const auto out = initial_fusion(random_matrix(k, 8, rng), random_matrix(t, 8, rng), p);
      EXPECT_EQ(out.rows(), t);
      EXPECT_EQ(out.cols(), 8u);
    }
  EXPECT_THROW(initial_fusion(random_matrix(2, 4, rng), random_matrix(3, 8, rng), p),
               ContractViolation);
}

TEST(Mfm, BridgeLengthArithmetic) {
  nn::Rng rng(3);
  std::vector<MfmBlock> blocks;
  for (int i = 0; i < 2; ++i) blocks.push_back(MfmBlock::init(8, 8, 2, kDefaultBridgeLength, 1, rng));
  const auto f = mfm_forward(random_matrix(6, 8, rng), random_matrix(11, 8, rng), blocks);
  EXPECT_EQ(f.block_lengths_ta, (std::vector<std::size_t>{10, 10}));
  EXPECT_EQ(f.block_lengths_m, (std::vector<std::size_t>{15, 15}));
  EXPECT_EQ(f.f_m_to_ta.rows(), 10u);
  EXPECT_EQ(f.ta_length, 6u);
  EXPECT_EQ(f.m_length, 11u);
}

TEST(Mfm, ZeroTransformersPassInputsThrough) {
  nn::Rng rng(4);
  auto block = MfmBlock::init(8, 8, 2, 4, 1, rng);
  zero_layer(block.trans_l);
  zero_layer(block.trans_v);
  auto f_ta = random_matrix(5, 8, rng), f_m = random_matrix(7, 8, rng);
  const auto f = mfm_forward(f_ta, f_m, {block});
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(f.f_m_to_ta.at(r, c), f_ta.at(r, c));
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(f.f_ta_to_m.at(r, c), f_m.at(r, c));
}

TEST(Mfm, MelReachesLanguageSideOnlyThroughBridge) {
  nn::Rng rng(5);
  std::vector<MfmBlock> blocks;
  for (int i = 0; i < 2; ++i) {
    blocks.push_back(MfmBlock::init(8, 8, 2, 4, 1, rng));
    zero_mlps(blocks.back());
  }
  auto f_ta = random_matrix(4, 8, rng);
  const auto base = mfm_forward(f_ta, random_matrix(9, 8, rng), blocks).f_m_to_ta;
  for (int trial = 0; trial < 5; ++trial) {
    const auto other = mfm_forward(f_ta, random_matrix(9, 8, rng), blocks).f_m_to_ta;
    EXPECT_EQ(other.values(), base.values());
  }
  // With live bridges the mel input does reach the language side.
  auto live = MfmBlock::init(8, 8, 2, 4, 1, rng);
  const auto a = mfm_forward(f_ta, random_matrix(9, 8, rng), {live}).f_m_to_ta;
  const auto b = mfm_forward(f_ta, random_matrix(9, 8, rng), {live}).f_m_to_ta;
  EXPECT_NE(a.values(), b.values());
}

TEST(Mfm, DistinctWidthsAndDeepMlp) {
  nn::Rng rng(6);
  auto block = MfmBlock::init(8, 4, 2, 3, 2, rng);
  const auto f = mfm_forward(random_matrix(5, 8, rng), random_matrix(6, 4, rng), {block});
  EXPECT_EQ(f.f_m_to_ta.cols(), 8u);
  EXPECT_EQ(f.f_ta_to_m.cols(), 4u);
  EXPECT_EQ(f.f_ta_to_m.rows(), 9u);
}

TEST(Mfm, GradientCheckTwoBlocks) {
  const auto e = tasks::check_mfm_stack(7);
  EXPECT_LE(e.result.max_rel_error, 1e-3) << e.result.worst_param;
  EXPECT_GT(e.result.coords_checked, 0u);
}

TEST(Classify, AveragedLogits) {
  nn::Rng rng(7);
  auto heads = ClassifierHeads::init(8, 8, 4, rng);
  auto a = random_matrix(6, 8, rng), b = random_matrix(9, 8, rng);
  const auto l = classify(a, 5, b, 7, heads);
  for (std::size_t c = 0; c < 4; ++c) {
    double pa = heads.head_a.bias.data()[c], pb = heads.head_b.bias.data()[c];
    for (std::size_t j = 0; j < 8; ++j) {
      double ma = 0, mb = 0;
      for (std::size_t r = 0; r < 5; ++r) ma += a.at(r, j) / 5.0;
      for (std::size_t r = 0; r < 7; ++r) mb += b.at(r, j) / 7.0;
      pa += ma * heads.head_a.weight.at(j, c);
      pb += mb * heads.head_b.weight.at(j, c);
    }
    EXPECT_NEAR(l.head_a.data()[c], pa, 1e-12);
    EXPECT_NEAR(l.head_b.data()[c], pb, 1e-12);
    EXPECT_NEAR(l.averaged.data()[c], (pa + pb) / 2.0, 1e-12);
  }
}

TEST(Classify, IdenticalHeadsAndZeroHead) {
  nn::Rng rng(8);
  auto heads = ClassifierHeads::init(8, 8, 3, rng);
  heads.head_b.weight.values() = heads.head_a.weight.values();
  heads.head_b.bias.values() = heads.head_a.bias.values();
  auto x = random_matrix(4, 8, rng);
  const auto same = classify(x, 4, x, 4, heads);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(same.averaged.data()[c], same.head_a.data()[c]);
  nn::ParamList pb;
  heads.head_b.collect("b", pb);
  nn::fill(pb, 0.0);
  const auto half = classify(x, 4, random_matrix(4, 8, rng), 4, heads);
  std::size_t arg_a = 0, arg_avg = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(half.averaged.data()[c], half.head_a.data()[c] / 2.0);
    if (half.head_a.data()[c] > half.head_a.data()[arg_a]) arg_a = c;
    if (half.averaged.data()[c] > half.averaged.data()[arg_avg]) arg_avg = c;
  }
  EXPECT_EQ(arg_a, arg_avg);
}

TEST(GradientSuite, EveryModulePasses) {
  for (const auto& e : tasks::run_gradient_suite(3))
    EXPECT_TRUE(e.passed()) << e.module << " " << e.result.max_rel_error;
}
