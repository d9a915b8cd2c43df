#pragma once

// Knowledge-based word relation tagging: word-level recurrence and relation
// matrices over a rendered dialogue, their combination, the per-word
// importance score and the feature scaling that consumes it.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ecue/corpus.hpp"
#include "ecue/error.hpp"
#include "ecue/knowledge.hpp"
#include "ecue/nn/ops.hpp"

namespace ecue {

using FunctionLexicon = std::unordered_set<std::string>;

// Default English function-word list; identical to data/function_words.txt.
inline const std::vector<std::string>& default_function_words() {
  static const std::vector<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an",
      "and", "any", "are", "as", "at", "be", "because", "been", "before",
      "being", "below", "between", "both", "but", "by", "can", "could", "did",
      "do", "does", "doing", "don", "down", "during", "each", "few", "for",
      "from", "further", "had", "has", "have", "having", "he", "her", "here",
      "hers", "herself", "him", "himself", "his", "how", "i", "if", "in",
      "into", "is", "it", "its", "itself", "just", "ll", "m", "me", "might",
      "more", "most", "must", "my", "myself", "no", "nor", "not", "now", "of",
      "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves",
      "out", "over", "own", "re", "s", "same", "shall", "she", "should", "so",
      "some", "such", "t", "than", "that", "the", "their", "theirs", "them",
      "themselves", "then", "there", "these", "they", "this", "those",
      "through", "to", "too", "under", "until", "up", "ve", "very", "was",
      "we", "were", "what", "when", "where", "which", "while", "who", "whom",
      "why", "will", "with", "would", "you", "your", "yours", "yourself",
      "yourselves"};
  return words;
}

inline FunctionLexicon default_function_lexicon() {
  const auto& w = default_function_words();
  return {w.begin(), w.end()};
}

// One word per line; blank lines and lines starting with '#' are ignored.
inline FunctionLexicon load_function_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open function-word lexicon: " + path.string());
  FunctionLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.empty() || line.front() == '#') continue;
    for (auto& t : toks) lex.insert(std::move(t));
  }
  return lex;
}

struct WordEntry {
  std::string surface;
  bool is_content = false;
  std::size_t utterance_index = 0;
  std::size_t token_begin = 0;  // span in the rendered token sequence
  std::size_t token_end = 0;
};

// Square integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(std::size_t n) : n_(n), v_(n * n, 0) {}
  std::size_t size() const { return n_; }
  int& operator()(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }
  int operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
  const std::vector<int>& values() const { return v_; }
  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<int> v_;
};

struct ImportanceMatrices {
  IntMatrix m_rec;
  IntMatrix m_rel;
  IntMatrix m;
  std::vector<WordEntry> words;
};

struct ImportanceVector {
  std::vector<double> scores;
};

// Every non-speaker token becomes a word. Our tokenizer yields one token per
// word, so spans have length one.
inline std::vector<WordEntry> classify_words(const std::vector<std::string>& tokens,
                                             const FunctionLexicon& function_words) {
  std::vector<WordEntry> words;
  std::size_t utterance = 0;
  bool seen_speaker = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_speaker_token(tokens[i])) {
      if (seen_speaker) ++utterance;
      seen_speaker = true;
      continue;
    }
    words.push_back({tokens[i], !function_words.contains(tokens[i]), utterance, i, i + 1});
  }
  return words;
}

inline IntMatrix build_recurrence_matrix(const std::vector<WordEntry>& words) {
  const std::size_t k = words.size();
  IntMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!words[i].is_content) continue;
    for (std::size_t j = i + 1; j < k; ++j)
      if (words[j].is_content && words[i].surface == words[j].surface)
        m(i, j) = m(j, i) = 1;
  }
  return m;
}

inline constexpr int kMaxRelationImportance = 3;

// Starts from zero and adds one per relation kind holding between the pair,
// capped at 3. Identical surfaces off the diagonal consult the KB as well.
inline IntMatrix build_relation_matrix(const std::vector<WordEntry>& words,
                                       const KnowledgeBase& kb) {
  const std::size_t k = words.size();
  IntMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!words[i].is_content) continue;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!words[j].is_content) continue;
      int count = 0;
      const auto rels = kb.query(words[i].surface, words[j].surface);
      for (auto r : kAllRelations)
        if (rels.contains(r)) count = std::min(count + 1, kMaxRelationImportance);
      m(i, j) = m(j, i) = count;
    }
  }
  return m;
}

inline ImportanceMatrices combine_matrices(IntMatrix m_rec, IntMatrix m_rel,
                                           std::vector<WordEntry> words = {}) {
  require(m_rec.size() == m_rel.size(),
          "combine_matrices: recurrence and relation matrices differ in size");
  require(words.empty() || words.size() == m_rec.size(),
          "combine_matrices: word count does not match matrix size");
  const std::size_t k = m_rec.size();
  IntMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = m_rec(i, j) + m_rel(i, j);
  return {std::move(m_rec), std::move(m_rel), std::move(m), std::move(words)};
}

inline ImportanceMatrices build_importance(const std::vector<WordEntry>& words,
                                           const KnowledgeBase& kb) {
  return combine_matrices(build_recurrence_matrix(words),
                          build_relation_matrix(words, kb), words);
}

// Row mean of m.
inline ImportanceVector squeeze_importance(const ImportanceMatrices& mats) {
  const std::size_t k = mats.m.size();
  ImportanceVector out{std::vector<double>(k, 0.0)};
  for (std::size_t i = 0; i < k; ++i) {
    long s = 0;
    for (std::size_t j = 0; j < k; ++j) s += mats.m(i, j);
    out.scores[i] = static_cast<double>(s) / static_cast<double>(k);
  }
  return out;
}

// Returns a description of the first violated invariant, if any.
inline std::optional<std::string> check_invariants(const ImportanceMatrices& mats) {
  const std::size_t k = mats.m.size();
  if (mats.m_rec.size() != k || mats.m_rel.size() != k)
    return "matrix sizes differ";
  if (!mats.words.empty() && mats.words.size() != k) return "word count != K";
  for (std::size_t i = 0; i < k; ++i) {
    if (mats.m_rec(i, i) || mats.m_rel(i, i) || mats.m(i, i))
      return "non-zero diagonal at " + std::to_string(i);
    for (std::size_t j = 0; j < k; ++j) {
      const int r = mats.m_rec(i, j), l = mats.m_rel(i, j), t = mats.m(i, j);
      if (r < 0 || r > 1) return "m_rec entry out of {0,1}";
      if (l < 0 || l > kMaxRelationImportance) return "m_rel entry out of {0..3}";
      if (t != r + l) return "m != m_rec + m_rel";
      if (r != mats.m_rec(j, i) || l != mats.m_rel(j, i)) return "asymmetric matrix";
      if (!mats.words.empty() &&
          (!mats.words[i].is_content || !mats.words[j].is_content) && t != 0)
        return "function word with non-zero importance";
    }
  }
  return std::nullopt;
}

// "<recurrence>/<relation codes>", e.g. "0/H", "1/N", "0/IC". Diagonal and
// function-word pairs are "0/N".
inline std::string pair_tag(const ImportanceMatrices& mats, const KnowledgeBase& kb,
                            std::size_t i, std::size_t j) {
  const auto& wi = mats.words.at(i);
  const auto& wj = mats.words.at(j);
  if (i == j || !wi.is_content || !wj.is_content) return "0/N";
  return std::to_string(mats.m_rec(i, j)) + "/" + kb.query(wi.surface, wj.surface).codes();
}

// Importance scaling: row k of `h_words` (K x d) times (w * scores[k] + b).
// `w` and `b` are single-value tensors.
inline nn::Tensor scale_text_features(const nn::Tensor& h_words,
                                      const std::vector<double>& scores,
                                      const nn::Tensor& w, const nn::Tensor& b) {
  require(h_words.rows() == scores.size(),
          "scale_text_features: " + std::to_string(scores.size()) +
              " scores for " + std::to_string(h_words.rows()) + " rows");
  auto s = nn::Tensor::matrix(scores.size(), 1, scores);
  return nn::scale_rows(h_words, nn::axpb(s, w, b));
}

}  // namespace ecue
