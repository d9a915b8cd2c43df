#pragma once

// Frame-level F0 (normalized autocorrelation) and RMS energy on the same
// framing as the mel spectrogram.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ecue/audio/mel.hpp"

namespace ecue::audio {

struct ProsodyFrames {
  std::vector<double> f0;      // Hz, 0 when unvoiced
  std::vector<double> energy;  // frame RMS
  std::size_t size() const { return f0.size(); }
};

namespace detail {

// Normalized autocorrelation of a mean-removed frame at lag `lag`.
inline double normalized_autocorr(const std::vector<double>& x, std::size_t lag) {
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  for (std::size_t n = 0; n + lag < x.size(); ++n) {
    num += x[n] * x[n + lag];
    e0 += x[n] * x[n];
    e1 += x[n + lag] * x[n + lag];
  }
  const double denom = std::sqrt(e0 * e1);
  return denom > 1e-12 ? num / denom : 0.0;
}

// Returns 0 for unvoiced frames.
inline double estimate_f0(const std::vector<double>& frame, const AudioConfig& cfg) {
  const auto lag_min = static_cast<std::size_t>(std::ceil(cfg.sample_rate / cfg.f0_max));
  const auto lag_max = std::min(static_cast<std::size_t>(std::floor(cfg.sample_rate / cfg.f0_min)),
                                frame.size() - 2);
  if (lag_max <= lag_min) return 0.0;
  double mean = 0.0;
  for (double v : frame) mean += v;
  mean /= static_cast<double>(frame.size());
  std::vector<double> x(frame.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = frame[i] - mean;

  std::vector<double> r(lag_max + 2, 0.0);
  for (std::size_t lag = lag_min - 1; lag <= lag_max + 1; ++lag)
    r[lag] = normalized_autocorr(x, lag);
  double best = 0.0;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, r[lag]);
  if (best < cfg.voicing_threshold) return 0.0;
  // First local peak close to the global maximum; avoids picking a multiple
  // of the period.
  std::size_t pick = 0;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
      pick = lag;
      break;
    }
  }
  if (pick == 0) return 0.0;
  // Parabolic refinement of the peak position.
  double lag = static_cast<double>(pick);
  const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
  const double denom = a - 2.0 * b + c;
  if (std::abs(denom) > 1e-12) lag += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  const double f0 = cfg.sample_rate / lag;
  if (f0 < cfg.f0_min || f0 > cfg.f0_max) return 0.0;
  return f0;
}

}  // namespace detail

inline ProsodyFrames prosody_features(const Waveform& w, const AudioConfig& cfg = {}) {
  const auto win = cfg.window_samples();
  const auto hop = cfg.hop_samples();
  const auto n_frames = frame_count(w.samples.size(), cfg);
  ProsodyFrames out;
  out.f0.resize(n_frames);
  out.energy.resize(n_frames);
  std::vector<double> frame(win);
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(t * hop), win, frame.begin());
    double ss = 0.0;
    for (double v : frame) ss += v * v;
    out.energy[t] = std::sqrt(ss / static_cast<double>(win));
    out.f0[t] = detail::estimate_f0(frame, cfg);
  }
  return out;
}

}  // namespace ecue::audio
