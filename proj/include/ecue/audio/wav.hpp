#pragma once

// Mono PCM WAV input/output (16-bit integer or 32-bit float) and linear
// resampling to the working rate.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "ecue/binary_io.hpp"
#include "ecue/error.hpp"

namespace ecue::audio {

inline constexpr double kDefaultSampleRate = 16000.0;

class UnsupportedFormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Waveform {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  double duration() const { return samples.size() / sample_rate; }
};

// Linear interpolation onto `target_rate`; output length is
// round(L * target_rate / sample_rate).
inline Waveform resample_linear(const Waveform& w, double target_rate) {
  if (w.sample_rate == target_rate || w.samples.empty()) {
    Waveform out = w;
    out.sample_rate = target_rate;
    return out;
  }
  const std::size_t n_in = w.samples.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * target_rate / w.sample_rate));
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  const double ratio = w.sample_rate / target_rate;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double t = static_cast<double>(i) * ratio;
    const auto i0 = std::min(static_cast<std::size_t>(t), n_in - 1);
    const auto i1 = std::min(i0 + 1, n_in - 1);
    const double frac = t - static_cast<double>(i0);
    out.samples[i] = w.samples[i0] + (w.samples[i1] - w.samples[i0]) * std::min(frac, 1.0);
  }
  return out;
}

namespace detail {

struct ByteReader {
  const std::vector<unsigned char>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw ParseError("WAV file is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[pos + b]) << (8 * b);
    pos += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::string tag() {
    need(4);
    std::string s(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + 4));
    pos += 4;
    return s;
  }
};

}  // namespace detail

inline Waveform decode_wav(const std::vector<unsigned char>& bytes,
                           double target_rate = kDefaultSampleRate) {
  detail::ByteReader r{bytes};
  if (r.tag() != "RIFF") throw ParseError("not a RIFF file");
  r.u32();
  if (r.tag() != "WAVE") throw ParseError("not a WAVE file");
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  for (;;) {
    const auto id = r.tag();
    const auto size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw ParseError("WAV fmt chunk too small");
      r.need(size);
      const auto start = r.pos;
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();
      r.u16();
      bits = r.u16();
      if (format == 0xFFFE && size >= 26) {
        r.u16();
        r.u16();
        r.u32();
        format = r.u16();  // first two bytes of the subformat GUID
      }
      r.pos = start + size + (size & 1);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("WAV data chunk precedes fmt chunk");
      if (channels != 1)
        throw UnsupportedFormatError("only mono WAV is supported (got " +
                                     std::to_string(channels) + " channels)");
      if (rate == 0) throw ParseError("WAV sample rate is zero");
      r.need(size);
      Waveform w;
      w.sample_rate = rate;
      if (format == 1 && bits == 16) {
        w.samples.resize(size / 2);
        for (auto& s : w.samples)
          s = static_cast<std::int16_t>(r.u16()) / 32768.0;
      } else if (format == 3 && bits == 32) {
        w.samples.resize(size / 4);
        for (auto& s : w.samples)
          s = std::clamp(static_cast<double>(std::bit_cast<float>(r.u32())), -1.0, 1.0);
      } else {
        throw UnsupportedFormatError("unsupported WAV encoding (format " +
                                     std::to_string(format) + ", " +
                                     std::to_string(bits) + " bits)");
      }
      return resample_linear(w, target_rate);
    } else {
      r.need(size);
      r.pos += size + (size & 1);
    }
  }
}

inline Waveform read_wav(const std::filesystem::path& path,
                         double target_rate = kDefaultSampleRate) {
  try {
    return decode_wav(read_file(path), target_rate);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

enum class WavEncoding { Pcm16, Float32 };

inline std::vector<unsigned char> encode_wav(const Waveform& w,
                                             WavEncoding enc = WavEncoding::Pcm16) {
  const std::uint16_t bits = enc == WavEncoding::Pcm16 ? 16 : 32;
  const std::uint16_t format = enc == WavEncoding::Pcm16 ? 1 : 3;
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * bits / 8);
  std::vector<unsigned char> out;
  auto put = [&](std::uint32_t v, int n) {
    for (int b = 0; b < n; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xFF));
  };
  auto tag = [&](const char* s) { out.insert(out.end(), s, s + 4); };
  tag("RIFF");
  put(36 + data_bytes, 4);
  tag("WAVE");
  tag("fmt ");
  put(16, 4);
  put(format, 2);
  put(1, 2);
  put(rate, 4);
  put(rate * bits / 8, 4);
  put(bits / 8, 2);
  put(bits, 2);
  tag("data");
  put(data_bytes, 4);
  for (double s : w.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    if (enc == WavEncoding::Pcm16) {
      const auto q = static_cast<std::int16_t>(std::clamp(std::lround(c * 32767.0), -32768L, 32767L));
      put(static_cast<std::uint16_t>(q), 2);
    } else {
      put(std::bit_cast<std::uint32_t>(static_cast<float>(c)), 4);
    }
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path, const Waveform& w,
                      WavEncoding enc = WavEncoding::Pcm16) {
  write_file(path, encode_wav(w, enc));
}

}  // namespace ecue::audio
