#pragma once

// Prosody enhancement: F_a = h_a + LN(Enc(h_a)), where Enc is a small
// trainable transformer over audio frames joined with per-frame pitch and
// energy channels.

#include <cstddef>
#include <string>
#include <vector>

#include "ecue/audio/prosody.hpp"
#include "ecue/nn/layers.hpp"

namespace ecue::audio {

inline constexpr std::size_t kProsodyChannels = 2;
inline constexpr double kF0Scale = 1.0 / 300.0;

// T x 2 matrix of (f0 / 300 Hz, energy).
inline nn::Tensor prosody_matrix(const std::vector<double>& f0,
                                 const std::vector<double>& energy) {
  require(f0.size() == energy.size() && !f0.empty(),
          "prosody_matrix: f0 and energy must be non-empty and aligned");
  std::vector<double> v(f0.size() * kProsodyChannels);
  for (std::size_t t = 0; t < f0.size(); ++t) {
    v[2 * t] = f0[t] * kF0Scale;
    v[2 * t + 1] = energy[t];
  }
  return nn::Tensor::matrix(f0.size(), kProsodyChannels, std::move(v));
}

inline nn::Tensor prosody_matrix(const ProsodyFrames& p) {
  return prosody_matrix(p.f0, p.energy);
}

struct ProsodyEncoderParams {
  nn::Linear input;  // (d + 2) -> d
  std::vector<nn::TransformerLayer> layers;
  nn::Linear output;  // d -> d
  nn::LayerNorm norm;

  static ProsodyEncoderParams init(std::size_t d, std::size_t heads,
                                   std::size_t n_layers, nn::Rng& rng) {
    ProsodyEncoderParams p;
    p.input = nn::Linear::init(d + kProsodyChannels, d, rng);
    for (std::size_t i = 0; i < n_layers; ++i)
      p.layers.push_back(nn::TransformerLayer::init(d, heads, rng));
    p.output = nn::Linear::init(d, d, rng);
    p.norm = nn::LayerNorm::init(d);
    return p;
  }

  void collect(const std::string& prefix, nn::ParamList& out) const {
    input.collect(prefix + ".input", out);
    for (std::size_t i = 0; i < layers.size(); ++i)
      layers[i].collect(prefix + ".layer" + std::to_string(i), out);
    output.collect(prefix + ".output", out);
    norm.collect(prefix + ".norm", out);
  }
};

// Enc(h_a): T x d.
inline nn::Tensor prosody_encode(const nn::Tensor& h_a, const ProsodyEncoderParams& enc,
                                 const nn::Tensor& prosody,
                                 const nn::ForwardContext& ctx = {}) {
  require(prosody.rows() == h_a.rows(),
          "prosody_enhance: " + std::to_string(prosody.rows()) + " prosody frames for " +
              std::to_string(h_a.rows()) + " audio frames");
  require(prosody.cols() == kProsodyChannels, "prosody_enhance: expected 2 prosody channels");
  auto h = nn::add_positions(enc.input(nn::concat_cols(h_a, prosody)));
  for (const auto& layer : enc.layers) h = layer(h, ctx);
  return enc.output(h);
}

inline nn::Tensor prosody_enhance(const nn::Tensor& h_a, const ProsodyEncoderParams& enc,
                                  const nn::Tensor& prosody,
                                  const nn::ForwardContext& ctx = {}) {
  return nn::add(h_a, enc.norm(prosody_encode(h_a, enc, prosody, ctx)));
}

}  // namespace ecue::audio
