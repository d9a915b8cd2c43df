#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecue/error.hpp"
#include "ecue/nn/tensor.hpp"

namespace ecue::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
};

// One Adam update of a single parameter array. `t` is the step number
// already incremented for this update (t >= 1).
inline void adam_update(std::span<double> param, std::span<const double> grad,
                        AdamMoments& state, const AdamConfig& cfg,
                        std::int64_t t) {
  require(param.size() == grad.size(), "adam: gradient size mismatch");
  require(t >= 1, "adam: step counter must be >= 1");
  if (state.m.size() != param.size()) state.m.assign(param.size(), 0.0);
  if (state.v.size() != param.size()) state.v.assign(param.size(), 0.0);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    param[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<AdamMoments> moments;  // parallel to the parameter list
};

// Applies one step to every parameter using its accumulated gradient.
// Parameters without a gradient are treated as having a zero gradient.
// Throws TrainingError on a non-finite gradient before touching anything.
inline void adam_step(ParamList& params, AdamState& state) {
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad())
      if (!std::isfinite(g))
        throw TrainingError("non-finite gradient in parameter '" + p.name + "'");
  }
  if (state.moments.size() != params.size()) state.moments.resize(params.size());
  ++state.step;
  std::vector<double> zeros;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& t = params[i].tensor;
    std::span<const double> g;
    if (t.has_grad()) {
      g = std::as_const(t).grad();
    } else {
      zeros.assign(t.size(), 0.0);
      g = zeros;
    }
    adam_update(t.data(), g, state.moments[i], state.config, state.step);
  }
}

}  // namespace ecue::nn
