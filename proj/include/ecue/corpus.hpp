#pragma once

// Conversations, EPC/ERC instance windowing and speaker-tagged rendering.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ecue/error.hpp"

namespace ecue {

using EmotionLabel = std::size_t;  // index into a Conversation's label_set

struct Utterance {
  std::size_t speaker_id = 0;
  std::string text;
  EmotionLabel emotion = 0;
  std::optional<std::filesystem::path> audio_path;
};

struct Conversation {
  std::string id;
  std::vector<Utterance> utterances;
  std::vector<std::string> label_set;
};

struct EpcInstance {
  std::vector<Utterance> history;
  std::size_t target_speaker = 0;
  EmotionLabel target_label = 0;
  std::size_t history_window = 0;
  std::size_t target_position = 0;  // index of the target in the source
};

struct ErcInstance {
  std::vector<Utterance> context;
  std::size_t target_index = 0;
  EmotionLabel target_label = 0;
  std::size_t source_position = 0;
};

namespace detail {

inline bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

// Length in bytes of a Unicode whitespace sequence starting at s[i], or 0.
inline std::size_t unicode_space_len(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
      c == '\f')
    return 1;
  auto byte = [&](std::size_t k) -> unsigned {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u;
  };
  if (c == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;  // U+1680
  if (c == 0xE2 && byte(1) == 0x80) {
    const unsigned b = byte(2);
    if ((b >= 0x80 && b <= 0x8A) || b == 0xA8 || b == 0xA9 || b == 0xAF)
      return 3;  // U+2000..200A, U+2028, U+2029, U+202F
  }
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;  // U+205F
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;  // U+3000
  return 0;
}

}  // namespace detail

// Lowercase, split on Unicode whitespace and ASCII punctuation, drop the
// punctuation. Non-ASCII bytes pass through unchanged.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    if (const auto n = detail::unicode_space_len(text, i)) {
      flush();
      i += n;
      continue;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    if (detail::is_ascii_punct(c)) {
      flush();
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      cur.push_back(static_cast<char>(c));
    }
    ++i;
  }
  flush();
  return out;
}

inline std::string speaker_token(std::size_t ordinal) {
  return "[s" + std::to_string(ordinal) + "]";
}

inline bool is_speaker_token(std::string_view tok) {
  if (tok.size() < 4 || tok.front() != '[' || tok[1] != 's' || tok.back() != ']')
    return false;
  return std::all_of(tok.begin() + 2, tok.end() - 1,
                     [](char c) { return c >= '0' && c <= '9'; });
}

// Maps each speaker id to its 1-based order of first appearance in `utts`.
class SpeakerOrdinals {
 public:
  explicit SpeakerOrdinals(const std::vector<Utterance>& utts) {
    for (const auto& u : utts) ordinal_of(u.speaker_id);
  }
  std::size_t ordinal_of(std::size_t speaker_id) {
    auto [it, inserted] = map_.try_emplace(speaker_id, map_.size() + 1);
    return it->second;
  }

 private:
  std::map<std::size_t, std::size_t> map_;
};

inline std::vector<std::string> render_speaker_sequence(
    const std::vector<Utterance>& utts) {
  require(!utts.empty(), "render_speaker_sequence: empty utterance sequence");
  SpeakerOrdinals ordinals(utts);
  std::vector<std::string> tokens;
  for (const auto& u : utts) {
    tokens.push_back(speaker_token(ordinals.ordinal_of(u.speaker_id)));
    for (auto& w : tokenize(u.text)) tokens.push_back(std::move(w));
  }
  return tokens;
}

// Instance k (1-based over targets) keeps the last min(k, window)
// utterances before utterance k.
inline std::vector<EpcInstance> build_epc_instances(const Conversation& conv,
                                                    std::size_t window) {
  require(window >= 1, "build_epc_instances: window must be >= 1");
  std::vector<EpcInstance> out;
  const auto& u = conv.utterances;
  for (std::size_t k = 1; k < u.size(); ++k) {
    const std::size_t begin = k > window ? k - window : 0;
    EpcInstance inst;
    inst.history.assign(u.begin() + static_cast<std::ptrdiff_t>(begin),
                        u.begin() + static_cast<std::ptrdiff_t>(k));
    inst.target_speaker = u[k].speaker_id;
    inst.target_label = u[k].emotion;
    inst.history_window = window;
    inst.target_position = k;
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<ErcInstance> build_erc_instances(const Conversation& conv,
                                                    std::size_t window) {
  require(window >= 1, "build_erc_instances: window must be >= 1");
  std::vector<ErcInstance> out;
  const auto& u = conv.utterances;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t begin = i + 1 > window ? i + 1 - window : 0;
    ErcInstance inst;
    inst.context.assign(u.begin() + static_cast<std::ptrdiff_t>(begin),
                        u.begin() + static_cast<std::ptrdiff_t>(i + 1));
    inst.target_index = i - begin;
    inst.target_label = u[i].emotion;
    inst.source_position = i;
    out.push_back(std::move(inst));
  }
  return out;
}

namespace detail {

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  });
}

inline Conversation parse_conversation(
    const nlohmann::json& j, std::size_t line,
    const std::vector<std::string>* declared,
    const std::filesystem::path& base_dir) {
  Conversation conv;
  try {
    conv.id = j.at("id").get<std::string>();
    conv.label_set = j.at("labels").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("conversation object: ") + e.what(), line);
  }
  if (declared && conv.label_set != *declared)
    throw ValidationError("conversation '" + conv.id + "' (line " +
                          std::to_string(line) +
                          ") declares a label set different from the schema");
  std::map<std::string, std::size_t> speakers;
  const auto utts = j.find("utterances");
  if (utts == j.end() || !utts->is_array())
    throw ParseError("conversation '" + conv.id + "' has no utterances array",
                     line);
  for (const auto& ju : *utts) {
    Utterance u;
    std::string speaker, emotion;
    try {
      speaker = ju.at("speaker").get<std::string>();
      u.text = ju.at("text").get<std::string>();
      emotion = ju.at("emotion").get<std::string>();
      if (auto a = ju.find("audio"); a != ju.end() && !a->is_null()) {
        std::filesystem::path p = a->get<std::string>();
        u.audio_path = p.is_absolute() ? p : base_dir / p;
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("utterance object: ") + e.what(), line);
    }
    if (blank(u.text))
      throw ValidationError("conversation '" + conv.id +
                            "' has an utterance with empty text (line " +
                            std::to_string(line) + ")");
    const auto pos =
        std::find(conv.label_set.begin(), conv.label_set.end(), emotion);
    if (pos == conv.label_set.end())
      throw ValidationError("unknown emotion label '" + emotion +
                            "' in conversation '" + conv.id + "' (line " +
                            std::to_string(line) + ")");
    u.emotion = static_cast<std::size_t>(pos - conv.label_set.begin());
    u.speaker_id = speakers.try_emplace(speaker, speakers.size()).first->second;
    conv.utterances.push_back(std::move(u));
  }
  if (conv.utterances.empty())
    throw ValidationError("conversation '" + conv.id +
                          "' has no utterances (line " + std::to_string(line) +
                          ")");
  return conv;
}

}  // namespace detail

// Reads conversation JSONL. When `declared_labels` is given every
// conversation must declare exactly that label set. Relative audio paths are
// resolved against the file's directory.
inline std::vector<Conversation> load_conversations(
    const std::filesystem::path& path,
    const std::optional<std::vector<std::string>>& declared_labels =
        std::nullopt) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open conversation file: " + path.string());
  std::vector<Conversation> out;
  std::string line;
  std::size_t lineno = 0;
  const auto base = path.parent_path();
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", lineno);
    out.push_back(detail::parse_conversation(
        j, lineno, declared_labels ? &*declared_labels : nullptr, base));
  }
  return out;
}

// Deterministic 70/15/15 split keyed on a hash of the conversation id.
enum class Split { Train, Dev, Test, All };

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Split split_of(std::string_view conversation_id, std::uint64_t seed) {
  const auto bucket = fnv1a64(conversation_id, seed) % 100;
  if (bucket < 70) return Split::Train;
  if (bucket < 85) return Split::Dev;
  return Split::Test;
}

inline std::vector<Conversation> select_split(
    const std::vector<Conversation>& corpus, Split which, std::uint64_t seed) {
  if (which == Split::All) return corpus;
  std::vector<Conversation> out;
  for (const auto& c : corpus)
    if (split_of(c.id, seed) == which) out.push_back(c);
  return out;
}

}  // namespace ecue
