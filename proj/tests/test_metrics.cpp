#include <gtest/gtest.h>

#include <vector>

#include "ecue/nn/random.hpp"
#include "ecue/tasks/metrics.hpp"

using namespace ecue;
using namespace ecue::tasks;

namespace {

// Straightforward floating-point recomputation.
Metrics brute_force(const std::vector<std::vector<std::size_t>>& cm) {
  const std::size_t c = cm.size();
  double total = 0, correct = 0, rsum = 0, fsum = 0, wsum = 0;
  std::size_t rn = 0, fn = 0;
  for (std::size_t i = 0; i < c; ++i) {
    double sup = 0, pred = 0;
    for (std::size_t j = 0; j < c; ++j) {
      sup += cm[i][j];
      pred += cm[j][i];
      total += cm[i][j];
    }
    const double tp = cm[i][i];
    correct += tp;
    if (sup > 0) {
      rsum += tp / sup;
      ++rn;
    }
    if (sup > 0 || pred > 0) {
      const double prec = pred > 0 ? tp / pred : 0.0;
      const double rec = sup > 0 ? tp / sup : 0.0;
      const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      fsum += f1;
      wsum += f1 * sup;
      ++fn;
    }
  }
  return {rsum / rn, fsum / fn, correct / total, wsum / total};
}

}  // namespace

TEST(Metrics, HandComputedCase) {
  const auto m = compute_metrics(ConfusionMatrix::from_rows({{1, 1}, {0, 2}}));
  EXPECT_EQ(m.uar, 0.75);
  EXPECT_EQ(m.macro_f1, 11.0 / 15.0);
  EXPECT_EQ(m.accuracy, 0.75);
  EXPECT_EQ(m.weighted_f1, 11.0 / 15.0);
}

TEST(Metrics, PerfectDiagonal) {
  const auto m = compute_metrics(ConfusionMatrix::from_rows({{3, 0, 0}, {0, 5, 0}, {0, 0, 1}}));
  EXPECT_EQ(m.uar, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.weighted_f1, 1.0);
}

TEST(Metrics, AbsentClassIsExcluded) {
  const auto m = compute_metrics(ConfusionMatrix::from_rows({{2, 1, 0}, {0, 3, 0}, {0, 0, 0}}));
  EXPECT_DOUBLE_EQ(m.uar, (2.0 / 3.0 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, (0.8 + 6.0 / 7.0) / 2.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 5.0 / 6.0);
}

TEST(Metrics, PredictedButNeverTrueCountsForF1Only) {
  const auto m = compute_metrics(ConfusionMatrix::from_rows({{1, 1}, {0, 0}}));
  EXPECT_EQ(m.uar, 0.5);
  EXPECT_DOUBLE_EQ(m.macro_f1, (2.0 / 3.0 + 0.0) / 2.0);
}

TEST(Metrics, RandomMatricesMatchBruteForce) {
  nn::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 2 + rng.below(6);
    std::vector<std::vector<std::size_t>> rows(c, std::vector<std::size_t>(c));
    for (auto& r : rows)
      for (auto& v : r) v = rng.below(4) == 0 ? 0 : rng.below(50);
    rows[0][0] += 1;
    const auto got = compute_metrics(ConfusionMatrix::from_rows(rows));
    const auto ref = brute_force(rows);
    EXPECT_NEAR(got.uar, ref.uar, 1e-12);
    EXPECT_NEAR(got.macro_f1, ref.macro_f1, 1e-12);
    EXPECT_NEAR(got.accuracy, ref.accuracy, 1e-12);
    EXPECT_NEAR(got.weighted_f1, ref.weighted_f1, 1e-12);
  }
}

TEST(Metrics, LargeCountsStayAccurate) {
  const std::size_t big = 4000000000ULL;
  const auto m = compute_metrics(ConfusionMatrix::from_rows({{big, 7}, {3, big - 1}}));
  const auto ref = brute_force({{big, 7}, {3, big - 1}});
  EXPECT_NEAR(m.macro_f1, ref.macro_f1, 1e-12);
}

TEST(Metrics, EmptyAndMalformed) {
  EXPECT_THROW(compute_metrics(ConfusionMatrix(3)), ContractViolation);
  EXPECT_THROW((ConfusionMatrix::from_rows({{1, 2}, {3}})), ContractViolation);
  ConfusionMatrix cm(2);
  EXPECT_THROW(cm.add(2, 0), ContractViolation);
  cm.add(1, 0);
  EXPECT_EQ(cm.at(1, 0), 1u);
  EXPECT_EQ(cm.support(1), 1u);
  EXPECT_EQ(cm.predicted(0), 1u);
}

TEST(Metrics, JsonCarriesConfusion) {
  const auto cm = ConfusionMatrix::from_rows({{1, 1}, {0, 2}});
  const auto j = metrics_json(compute_metrics(cm), cm);
  EXPECT_EQ(j.at("confusion"), nlohmann::json::parse("[[1,1],[0,2]]"));
  EXPECT_EQ(j.at("uar").get<double>(), 0.75);
}
