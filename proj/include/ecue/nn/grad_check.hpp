#pragma once

// Central finite-difference check of reverse-mode gradients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ecue/nn/random.hpp"
#include "ecue/nn/tensor.hpp"

namespace ecue::nn {

struct GradCheckOptions {
  double step = 1e-5;
  double denominator_floor = 1e-8;
  // Coordinates sampled per parameter tensor; 0 checks every coordinate.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

// |a - n| / max(|a|, |n|, floor)
inline double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// `loss` rebuilds the graph from the current parameter values and returns a
// single-value tensor.
inline GradCheckResult grad_check(const std::function<Tensor()>& loss,
                                  ParamList params,
                                  const GradCheckOptions& opt = {}) {
  zero_grads(params);
  loss().backward();
  std::vector<std::vector<double>> analytic;
  for (auto& p : params) {
    if (p.tensor.has_grad())
      analytic.emplace_back(p.tensor.grad().begin(), p.tensor.grad().end());
    else
      analytic.emplace_back(p.tensor.size(), 0.0);
  }
  GradCheckResult res;
  Rng rng(opt.seed);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto data = params[pi].tensor.data();
    std::vector<std::size_t> coords(data.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (opt.max_coords_per_tensor && coords.size() > opt.max_coords_per_tensor) {
      rng.shuffle(coords.begin(), coords.end());
      coords.resize(opt.max_coords_per_tensor);
    }
    for (auto i : coords) {
      const double orig = data[i];
      data[i] = orig + opt.step;
      const double fp = loss().item();
      data[i] = orig - opt.step;
      const double fm = loss().item();
      data[i] = orig;
      const double numeric = (fp - fm) / (2.0 * opt.step);
      const double err =
          relative_error(analytic[pi][i], numeric, opt.denominator_floor);
      ++res.coords_checked;
      if (err > res.max_rel_error || res.worst_param.empty()) {
        if (err >= res.max_rel_error) {
          res.max_rel_error = err;
          res.worst_param = params[pi].name;
          res.worst_index = i;
          res.worst_analytic = analytic[pi][i];
          res.worst_numeric = numeric;
        }
      }
    }
  }
  zero_grads(params);
  return res;
}

}  // namespace ecue::nn
