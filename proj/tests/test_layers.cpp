#include <gtest/gtest.h>

#include <vector>

#include "ecue/nn/grad_check.hpp"
#include "ecue/nn/layers.hpp"

using namespace ecue;
using nn::Tensor;

namespace {

Tensor random_input(std::size_t r, std::size_t c, nn::Rng& rng, bool grad = false) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = rng.normal();
  return Tensor::matrix(r, c, std::move(v), grad);
}

// Zeros every projection; layer norms keep gamma = 1, beta = 0.
void zero_projections(nn::TransformerLayer& t) {
  nn::ParamList ps;
  t.attention.collect("attn", ps);
  t.ff_in.collect("ff_in", ps);
  t.ff_out.collect("ff_out", ps);
  nn::fill(ps, 0.0);
}

}  // namespace

TEST(Transformer, ZeroParametersGiveIdentity) {
  nn::Rng rng(1);
  auto layer = nn::TransformerLayer::init(8, 2, rng);
  zero_projections(layer);
  auto x = random_input(5, 8, rng);
  const auto y = nn::transformer_layer(x, layer);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
}

TEST(Transformer, SinglePositionUsesValuePath) {
  nn::Rng rng(2);
  auto layer = nn::TransformerLayer::init(8, 4, rng);
  auto x = random_input(1, 8, rng);
  const auto h = layer.norm1(x);
  const auto y1 = nn::add(x, layer.attention.output(layer.attention.value(h)));
  const auto expect = nn::add(y1, layer.ff_out(nn::gelu(layer.ff_in(layer.norm2(y1)))));
  const auto y = layer(x);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(y.data()[i], expect.data()[i], 1e-12);
}

TEST(Transformer, ParameterLayout) {
  nn::Rng rng(3);
  auto layer = nn::TransformerLayer::init(8, 2, rng);
  nn::ParamList ps;
  layer.collect("t", ps);
  // 2 layer norms, q/v/o with bias, k without, FFN of width 32.
  const std::size_t expect = 2 * 16 + 3 * (64 + 8) + 64 + (8 * 32 + 32) + (32 * 8 + 8);
  EXPECT_EQ(nn::parameter_count(ps), expect);
  for (const auto& p : ps) EXPECT_NE(p.name, "t.attn.key.bias");
  EXPECT_THROW(nn::TransformerLayer::init(6, 4, rng), ContractViolation);
}

TEST(Transformer, GradientCheck) {
  nn::Rng rng(4);
  auto layer = nn::TransformerLayer::init(4, 2, rng);
  auto x = random_input(3, 4, rng, true);
  auto w = random_input(3, 4, rng);
  nn::ParamList ps = {{"x", x}};
  layer.collect("layer", ps);
  const auto res =
      nn::grad_check([&] { return nn::sum(nn::mul(layer(x), w)); }, ps);
  EXPECT_LE(res.max_rel_error, 1e-3) << res.worst_param;
}

TEST(LayerNormModule, SumGradientCheck) {
  nn::Rng rng(5);
  auto ln = nn::LayerNorm::init(6);
  for (auto& v : ln.gamma.data()) v = rng.uniform(0.5, 1.5);
  auto x = random_input(4, 6, rng, true);
  nn::ParamList ps = {{"x", x}};
  ln.collect("ln", ps);
  EXPECT_LE(nn::grad_check([&] { return nn::sum(ln(x)); }, ps).max_rel_error, 1e-3);
}

TEST(MlpModule, DepthAndShape) {
  nn::Rng rng(6);
  auto one = nn::Mlp::init(4, 4, 1, rng);
  EXPECT_EQ(one.layers.size(), 1u);
  auto two = nn::Mlp::init(3, 5, 2, rng);
  const auto y = two(random_input(2, 3, rng));
  EXPECT_EQ(y.rows(), 2u);
  EXPECT_EQ(y.cols(), 5u);
  EXPECT_THROW(nn::Mlp::init(3, 3, 0, rng), ContractViolation);
}

TEST(Context, DropoutOnlyWhenTraining) {
  nn::Rng rng(7);
  auto x = random_input(2, 4, rng);
  nn::ForwardContext eval{false, 0.5, &rng};
  EXPECT_TRUE(eval.maybe_dropout(x).same_node(x));
  nn::ForwardContext train{true, 0.5, &rng};
  EXPECT_FALSE(train.maybe_dropout(x).same_node(x));
}
