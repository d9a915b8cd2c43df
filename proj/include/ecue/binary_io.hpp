#pragma once

// Little-endian 32-bit float blobs.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ecue/error.hpp"

namespace ecue {

inline void append_f32_le(std::vector<unsigned char>& out,
                          std::span<const double> values) {
  out.reserve(out.size() + 4 * values.size());
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b)
      out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xFFu));
  }
}

inline std::vector<double> read_f32_le(std::span<const unsigned char> bytes,
                                       std::size_t offset, std::size_t count) {
  if (offset + 4 * count > bytes.size())
    throw ParseError("binary blob is shorter than the manifest declares");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(bytes[offset + 4 * i + b]) << (8 * b);
    out[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return out;
}

inline void write_file(const std::filesystem::path& path,
                       std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const unsigned char*>(text.data()),
                             text.size()));
}

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string read_text_file(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

}  // namespace ecue
