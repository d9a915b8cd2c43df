#pragma once

// Confusion matrices and the four reported scores: UAR, macro-F1, accuracy
// and support-weighted F1.

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecue/error.hpp"

namespace ecue::tasks {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes)
      : classes_(classes), counts_(classes * classes, 0) {}
  static ConfusionMatrix from_rows(const std::vector<std::vector<std::size_t>>& rows) {
    ConfusionMatrix cm(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      require(rows[t].size() == rows.size(), "confusion matrix must be square");
      for (std::size_t p = 0; p < rows.size(); ++p) cm.counts_[t * rows.size() + p] = rows[t][p];
    }
    return cm;
  }

  void add(std::size_t truth, std::size_t pred) {
    require(truth < classes_ && pred < classes_, "confusion matrix: class out of range");
    ++counts_[truth * classes_ + pred];
  }
  std::size_t classes() const { return classes_; }
  std::size_t at(std::size_t truth, std::size_t pred) const {
    return counts_[truth * classes_ + pred];
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }
  std::size_t support(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < classes_; ++p) s += at(c, p);
    return s;
  }
  std::size_t predicted(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t t = 0; t < classes_; ++t) s += at(t, c);
    return s;
  }
  std::vector<std::vector<std::size_t>> rows() const {
    std::vector<std::vector<std::size_t>> out(classes_, std::vector<std::size_t>(classes_));
    for (std::size_t t = 0; t < classes_; ++t)
      for (std::size_t p = 0; p < classes_; ++p) out[t][p] = at(t, p);
    return out;
  }

 private:
  std::size_t classes_ = 0;
  std::vector<std::size_t> counts_;
};

struct Metrics {
  double uar = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
};

namespace detail {

// Sum of non-negative fractions kept exact while it fits in 128 bits, so
// results such as 11/15 come out correctly rounded. Falls back to long double
// on overflow.
class FractionSum {
 public:
  void add(unsigned __int128 num, unsigned __int128 den) {
    approx_ += static_cast<long double>(num) / static_cast<long double>(den);
    if (!exact_) return;
    const U128 g = gcd128(num, den);
    const U128 n = num / g, d = den / g;
    const U128 common = den_ / gcd128(den_, d);
    U128 new_den, a, b;
    if (__builtin_mul_overflow(common, d, &new_den) ||
        __builtin_mul_overflow(num_, new_den / den_, &a) ||
        __builtin_mul_overflow(n, new_den / d, &b) || __builtin_add_overflow(a, b, &num_)) {
      exact_ = false;
      return;
    }
    den_ = new_den;
    const U128 r = gcd128(num_, den_);
    num_ /= r;
    den_ /= r;
  }
  double divided_by(std::uint64_t k) const {
    if (exact_) {
      U128 den;
      if (!__builtin_mul_overflow(den_, static_cast<U128>(k), &den)) {
        const U128 r = gcd128(num_, den);
        return ratio(num_ / r, den / r);
      }
    }
    return static_cast<double>(approx_ / static_cast<long double>(k));
  }

 private:
  using U128 = unsigned __int128;
  static U128 gcd128(U128 a, U128 b) {
    while (b != 0) {
      const U128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static double ratio(U128 n, U128 d) {
    if (n <= (U128{1} << 53) && d <= (U128{1} << 53))
      return static_cast<double>(static_cast<std::uint64_t>(n)) /
             static_cast<double>(static_cast<std::uint64_t>(d));
    return static_cast<double>(static_cast<long double>(n) / static_cast<long double>(d));
  }

  U128 num_ = 0, den_ = 1;
  bool exact_ = true;
  long double approx_ = 0.0L;
};

}  // namespace detail

// UAR averages recall over classes with non-zero support. Macro-F1 averages
// F1 over classes that occur as a true or a predicted label. Per-class F1 is
// 0 when precision + recall is 0. Sums are formed over exact fractions
// (F1 = 2tp / (2tp + fp + fn)) and rounded once.
inline Metrics compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  require(cm.classes() > 0 && total > 0, "compute_metrics: empty confusion matrix");
  Metrics m;
  detail::FractionSum recall_sum, f1_sum, weighted;
  std::size_t recall_classes = 0, f1_classes = 0, correct = 0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t sup = cm.support(c);
    const std::uint64_t pred = cm.predicted(c);
    correct += tp;
    if (sup) {
      recall_sum.add(tp, sup);
      ++recall_classes;
    }
    if (sup || pred) {
      // 2tp + fp + fn = sup + pred
      f1_sum.add(2 * tp, sup + pred);
      weighted.add(static_cast<unsigned __int128>(2 * tp) * sup, sup + pred);
      ++f1_classes;
    }
  }
  m.uar = recall_sum.divided_by(recall_classes);
  m.macro_f1 = f1_sum.divided_by(f1_classes);
  m.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  m.weighted_f1 = weighted.divided_by(total);
  return m;
}

inline nlohmann::json metrics_json(const Metrics& m, const ConfusionMatrix& cm) {
  return {{"uar", m.uar},
          {"macro_f1", m.macro_f1},
          {"accuracy", m.accuracy},
          {"weighted_f1", m.weighted_f1},
          {"confusion", cm.rows()}};
}

}  // namespace ecue::tasks
