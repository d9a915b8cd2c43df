#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ecue/nn/adam.hpp"
#include "ecue/nn/ops.hpp"

using namespace ecue;
using nn::Tensor;

TEST(Adam, ZeroLearningRateLeavesParameters) {
  auto p = Tensor::matrix(1, 3, {0.5, -1.0, 2.0}, true);
  nn::ParamList ps = {{"p", p}};
  nn::AdamState st;
  st.config.lr = 0.0;
  for (int i = 0; i < 3; ++i) {
    nn::zero_grads(ps);
    nn::sum(nn::mul(p, p)).backward();
    nn::adam_step(ps, st);
  }
  EXPECT_EQ(p.values(), (std::vector<double>{0.5, -1.0, 2.0}));
}

TEST(Adam, FirstStepIsSignTimesLr) {
  auto p = Tensor::matrix(1, 4, {0, 0, 0, 0}, true);
  for (std::size_t i = 0; i < 4; ++i) p.grad()[i] = std::vector<double>{3.0, -0.2, 1e-3, -50.0}[i];
  nn::ParamList ps = {{"p", p}};
  nn::AdamState st;
  st.config.lr = 0.01;
  nn::adam_step(ps, st);
  const double sign[] = {1, -1, 1, -1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p.data()[i], -0.01 * sign[i], 1e-7);
}

TEST(Adam, TwoStepsOnQuadraticMatchHandTrace) {
  // f(x) = (x - 1)^2 from x = 3: g = 2(x - 1).
  auto x = Tensor::scalar(3.0, true);
  nn::ParamList ps = {{"x", x}};
  nn::AdamState st;
  st.config.lr = 0.1;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.1;
  double xv = 3.0, m = 0, v = 0;
  for (int t = 1; t <= 2; ++t) {
    nn::zero_grads(ps);
    const auto d = nn::sub(x, Tensor::scalar(1.0));
    nn::mul(d, d).backward();
    nn::adam_step(ps, st);
    const double g = 2.0 * (xv - 1.0);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
    xv -= lr * mh / (std::sqrt(vh) + eps);
    EXPECT_NEAR(x.item(), xv, 1e-12) << "step " << t;
  }
  EXPECT_EQ(st.step, 2);
}

TEST(Adam, NonFiniteGradientAbortsWithoutUpdating) {
  auto a = Tensor::scalar(1.0, true), b = Tensor::scalar(2.0, true);
  a.grad()[0] = 1.0;
  b.grad()[0] = std::numeric_limits<double>::quiet_NaN();
  nn::ParamList ps = {{"a", a}, {"b", b}};
  nn::AdamState st;
  try {
    nn::adam_step(ps, st);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
  EXPECT_EQ(a.item(), 1.0);
  EXPECT_EQ(st.step, 0);
}

TEST(Adam, MissingGradientCountsAsZero) {
  auto a = Tensor::scalar(1.0, true);
  nn::ParamList ps = {{"a", a}};
  nn::AdamState st;
  nn::adam_step(ps, st);
  EXPECT_EQ(a.item(), 1.0);
}
