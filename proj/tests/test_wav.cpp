#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ecue/audio/wav.hpp"
#include "test_support.hpp"

using namespace ecue;
using namespace ecue::audio;

namespace {

Waveform sine(double hz, double rate, std::size_t n, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  for (std::size_t i = 0; i < n; ++i)
    w.samples.push_back(amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate));
  return w;
}

}  // namespace

TEST(Wav, OneSecondPcm16) {
  test::TempDir dir("wav_pcm");
  write_wav(dir / "a.wav", sine(440, 16000, 16000));
  const auto w = read_wav(dir / "a.wav");
  EXPECT_EQ(w.samples.size(), 16000u);
  EXPECT_EQ(w.sample_rate, 16000.0);
  const auto ref = sine(440, 16000, 16000);
  for (std::size_t i = 0; i < 16000; ++i) EXPECT_NEAR(w.samples[i], ref.samples[i], 1.0 / 32767.0);
}

TEST(Wav, AllZero) {
  Waveform z;
  z.samples.assign(800, 0.0);
  for (double s : decode_wav(encode_wav(z)).samples) EXPECT_EQ(s, 0.0);
}

TEST(Wav, Float32RoundTrip) {
  const auto ref = sine(300, 16000, 400);
  const auto w = decode_wav(encode_wav(ref, WavEncoding::Float32));
  for (std::size_t i = 0; i < ref.samples.size(); ++i)
    EXPECT_EQ(w.samples[i], static_cast<double>(static_cast<float>(ref.samples[i])));
}

TEST(Wav, ResamplesEightKilohertz) {
  const auto in = sine(200, 8000, 8000);
  const auto w = decode_wav(encode_wav(in, WavEncoding::Float32));
  ASSERT_EQ(w.samples.size(), 16000u);
  const auto ref = sine(200, 16000, 16000);
  double worst = 0.0;
  // The final output sample lies past the last input sample and is held.
  for (std::size_t i = 0; i + 1 < ref.samples.size(); ++i)
    worst = std::max(worst, std::abs(w.samples[i] - ref.samples[i]));
  EXPECT_LE(worst, 1e-2);
}

TEST(Wav, StereoIsUnsupported) {
  auto bytes = encode_wav(sine(440, 16000, 100));
  bytes[22] = 2;  // channel count
  EXPECT_THROW(decode_wav(bytes), UnsupportedFormatError);
}

TEST(Wav, UnsupportedEncoding) {
  auto bytes = encode_wav(sine(440, 16000, 100));
  bytes[34] = 8;  // bits per sample
  EXPECT_THROW(decode_wav(bytes), UnsupportedFormatError);
}

TEST(Wav, TruncatedInputIsParseError) {
  auto bytes = encode_wav(sine(440, 16000, 100));
  EXPECT_THROW(decode_wav(std::vector<unsigned char>(bytes.begin(), bytes.begin() + 30)), ParseError);
  EXPECT_THROW(decode_wav(std::vector<unsigned char>(bytes.begin(), bytes.end() - 10)), ParseError);
  EXPECT_THROW(decode_wav({'R', 'I', 'F', 'X'}), ParseError);
  test::TempDir dir("wav_missing");
  EXPECT_THROW(read_wav(dir / "nope.wav"), IoError);
}
