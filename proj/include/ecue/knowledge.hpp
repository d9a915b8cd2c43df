#pragma once

// Offline common-sense relation store over IsA / HasContext / Causes triples.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ecue/error.hpp"

namespace ecue {

enum class RelationKind : std::uint8_t { IsA = 0, HasContext = 1, Causes = 2 };

inline constexpr std::array<RelationKind, 3> kAllRelations = {
    RelationKind::IsA, RelationKind::HasContext, RelationKind::Causes};

inline char relation_code(RelationKind r) {
  switch (r) {
    case RelationKind::IsA: return 'I';
    case RelationKind::HasContext: return 'H';
    case RelationKind::Causes: return 'C';
  }
  return '?';
}

inline std::string_view relation_name(RelationKind r) {
  switch (r) {
    case RelationKind::IsA: return "IsA";
    case RelationKind::HasContext: return "HasContext";
    case RelationKind::Causes: return "Causes";
  }
  return "?";
}

inline std::optional<RelationKind> parse_relation(std::string_view name) {
  for (auto r : kAllRelations)
    if (relation_name(r) == name) return r;
  return std::nullopt;
}

// Small bitset over the three relation kinds.
class RelationSet {
 public:
  RelationSet() = default;
  RelationSet(std::initializer_list<RelationKind> kinds) {
    for (auto k : kinds) insert(k);
  }
  void insert(RelationKind r) { bits_ |= bit(r); }
  bool contains(RelationKind r) const { return bits_ & bit(r); }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const {
    return static_cast<std::size_t>(__builtin_popcount(bits_));
  }
  RelationSet& operator|=(RelationSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  bool operator==(const RelationSet&) const = default;
  // "IHC" order; "N" when empty.
  std::string codes() const {
    std::string s;
    for (auto r : kAllRelations)
      if (contains(r)) s.push_back(relation_code(r));
    return s.empty() ? "N" : s;
  }

 private:
  static std::uint8_t bit(RelationKind r) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r));
  }
  std::uint8_t bits_ = 0;
};

struct Triple {
  std::string head;
  RelationKind relation;
  std::string tail;
  auto operator<=>(const Triple&) const = default;
};

struct KbLoadStats {
  std::size_t lines = 0;
  std::size_t skipped_relations = 0;  // lines with a relation outside the set
  std::size_t duplicates = 0;
};

class KnowledgeBase {
 public:
  // Returns false when the triple was already present.
  bool add(Triple t) {
    validate_word(t.head);
    validate_word(t.tail);
    const auto key = pair_key(t.head, t.tail);
    const auto rel = t.relation;
    if (!triples_.insert(std::move(t)).second) return false;
    index_[key].insert(rel);
    return true;
  }

  RelationSet query(std::string_view a, std::string_view b) const {
    const auto it = index_.find(pair_key(a, b));
    return it == index_.end() ? RelationSet{} : it->second;
  }

  const std::set<Triple>& triples() const { return triples_; }
  std::size_t triple_count() const { return triples_.size(); }

  std::size_t vocabulary_size() const {
    std::set<std::string_view> words;
    for (const auto& t : triples_) {
      words.insert(t.head);
      words.insert(t.tail);
    }
    return words.size();
  }

 private:
  static void validate_word(const std::string& w) {
    if (w.empty()) throw ValidationError("knowledge base word is empty");
    for (unsigned char c : w) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
        throw ValidationError("knowledge base word '" + w +
                              "' is not a single token");
      if (c >= 'A' && c <= 'Z')
        throw ValidationError("knowledge base word '" + w +
                              "' is not lowercase");
    }
  }
  static std::string pair_key(std::string_view a, std::string_view b) {
    if (b < a) std::swap(a, b);
    std::string key;
    key.reserve(a.size() + b.size() + 1);
    key.append(a).push_back('\t');
    key.append(b);
    return key;
  }

  std::set<Triple> triples_;
  std::unordered_map<std::string, RelationSet> index_;
};

inline RelationSet query_relations(const KnowledgeBase& kb, std::string_view a,
                                   std::string_view b) {
  return kb.query(a, b);
}

// TSV: head <TAB> relation <TAB> tail. Words are lowercased on load.
// Relations outside {IsA, HasContext, Causes} are skipped and counted.
inline KnowledgeBase load_kb(const std::filesystem::path& path,
                             KbLoadStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open knowledge base: " + path.string());
  KnowledgeBase kb;
  KbLoadStats local;
  std::string line;
  std::size_t lineno = 0;
  auto lower = [](std::string s) {
    for (auto& c : s)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw ParseError("expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    ++local.lines;
    const auto rel = parse_relation(fields[1]);
    if (!rel) {
      ++local.skipped_relations;
      continue;
    }
    try {
      if (!kb.add({lower(fields[0]), *rel, lower(fields[2])}))
        ++local.duplicates;
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (stats) *stats = local;
  return kb;
}

}  // namespace ecue
