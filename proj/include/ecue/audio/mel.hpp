#pragma once

// Log-mel spectrogram: Hann-windowed frames, zero-padded real FFT, HTK-scale
// triangular filterbank, natural log with a floor.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "ecue/audio/wav.hpp"
#include "ecue/error.hpp"

namespace ecue::audio {

// All DSP constants live here.
struct AudioConfig {
  double sample_rate = kDefaultSampleRate;
  double window_s = 0.025;
  double hop_s = 0.010;
  std::size_t n_mels = 80;
  std::size_t fft_size = 512;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;
  double f0_min = 50.0;
  double f0_max = 600.0;
  double voicing_threshold = 0.3;

  std::size_t window_samples() const {
    return static_cast<std::size_t>(std::lround(window_s * sample_rate));
  }
  std::size_t hop_samples() const {
    return static_cast<std::size_t>(std::lround(hop_s * sample_rate));
  }
};

class EmptyFramesError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Row-major frames x n_mels.
struct MelSpectrogram {
  std::vector<double> frames;
  std::size_t n_frames = 0;
  std::size_t n_mels = 0;
  double frame_hop = 0.0;
  double window = 0.0;

  double at(std::size_t t, std::size_t b) const { return frames[t * n_mels + b]; }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// 1 + floor((L - window) / hop), or 0 when L < window.
inline std::size_t frame_count(std::size_t n_samples, const AudioConfig& cfg) {
  const auto win = cfg.window_samples();
  if (n_samples < win) return 0;
  return 1 + (n_samples - win) / cfg.hop_samples();
}

// Filter i rises from edge i to its center (edge i+1) and falls to edge i+2,
// where the n_mels + 2 edges are equally spaced in mel between f_min and f_max.
struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;  // fft_size / 2 + 1
  std::vector<double> weights;  // n_mels x n_bins
  std::vector<double> center_hz;

  static MelFilterbank build(const AudioConfig& cfg) {
    MelFilterbank fb;
    fb.n_mels = cfg.n_mels;
    fb.n_bins = cfg.fft_size / 2 + 1;
    fb.weights.assign(fb.n_mels * fb.n_bins, 0.0);
    const double mel_lo = hz_to_mel(cfg.f_min), mel_hi = hz_to_mel(cfg.f_max);
    const double delta = (mel_hi - mel_lo) / static_cast<double>(cfg.n_mels + 1);
    for (std::size_t m = 0; m < fb.n_mels; ++m) {
      const double left = mel_lo + m * delta;
      const double center = left + delta;
      const double right = center + delta;
      fb.center_hz.push_back(mel_to_hz(center));
      for (std::size_t k = 0; k < fb.n_bins; ++k) {
        const double mel = hz_to_mel(k * cfg.sample_rate / static_cast<double>(cfg.fft_size));
        double w = 0.0;
        if (mel > left && mel <= center)
          w = (mel - left) / delta;
        else if (mel > center && mel < right)
          w = (right - mel) / delta;
        fb.weights[m * fb.n_bins + k] = w;
      }
    }
    return fb;
  }
};

// Hann window of length n (symmetric).
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  if (n == 1) return {1.0};
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(n - 1));
  return w;
}

namespace detail {

// Owns an FFTW real-to-complex plan and its buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  // |X_k|^2 for k = 0..n/2
  void power(std::vector<double>& out) {
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace detail

inline MelSpectrogram mel_spectrogram(const Waveform& w, const AudioConfig& cfg = {}) {
  const auto win = cfg.window_samples();
  const auto hop = cfg.hop_samples();
  require(win <= cfg.fft_size, "mel_spectrogram: window longer than FFT size");
  const auto n_frames = frame_count(w.samples.size(), cfg);
  if (n_frames == 0)
    throw EmptyFramesError("waveform of " + std::to_string(w.samples.size()) +
                           " samples is shorter than one analysis window (" +
                           std::to_string(win) + ")");
  const auto fb = MelFilterbank::build(cfg);
  const auto window = hann_window(win);
  detail::RealFft fft(cfg.fft_size);
  MelSpectrogram out;
  out.n_frames = n_frames;
  out.n_mels = cfg.n_mels;
  out.frame_hop = cfg.hop_s;
  out.window = cfg.window_s;
  out.frames.resize(n_frames * cfg.n_mels);
  std::vector<double> power;
  for (std::size_t t = 0; t < n_frames; ++t) {
    double* in = fft.input();
    for (std::size_t i = 0; i < cfg.fft_size; ++i)
      in[i] = i < win ? w.samples[t * hop + i] * window[i] : 0.0;
    fft.power(power);
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      const double* wrow = fb.weights.data() + m * fb.n_bins;
      for (std::size_t k = 0; k < fb.n_bins; ++k) e += wrow[k] * power[k];
      out.frames[t * cfg.n_mels + m] = std::log(std::max(e, cfg.log_floor));
    }
  }
  return out;
}

}  // namespace ecue::audio
