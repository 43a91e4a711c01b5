#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "molhallu/lexicon.hpp"

namespace molhallu {

inline constexpr int kMaxOrder = 4;

// Byte range [begin, end) of a token in the source string.
struct SourceRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TokenizedText {
  std::string source;
  std::vector<std::string> tokens;
  // Parallel to tokens. A trailing punctuation token maps to its own
  // character; a word token maps to the raw word it came from.
  std::vector<SourceRange> ranges;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// Normalizes, splits on whitespace, then peels trailing sentence
/// punctuation (. , ; : ! ?) off each word as separate tokens. Hyphens and
/// parentheses stay attached, so "(-OH)" is a single token "(-oh)".
TokenizedText tokenize(std::string_view text);

struct EntitySpan {
  std::size_t start = 0;
  std::size_t length = 0;
  RecordId record_id = 0;

  std::size_t end() const { return start + length; }

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct NGramMultiset {
  int order = 1;
  // Key is the n-gram's tokens joined by a single space. Tokens never
  // contain whitespace, so the key is unambiguous.
  std::unordered_map<std::string, std::size_t> counts;

  std::size_t total() const;
  std::size_t count(std::string_view key) const;
};

std::string ngram_key(std::span<const std::string> tokens);

// Throws ValidationError unless 1 <= order <= 4.
NGramMultiset extract_ngrams(std::span<const std::string> tokens, int order);

/// Greedy leftmost-longest dictionary segmentation. Spans are sorted and
/// non-overlapping.
std::vector<EntitySpan> extract_entities(std::span<const std::string> tokens,
                                         const EntityLexicon& lexicon);

/// Rebuilds the source string with each span's bytes replaced by the
/// matching entry of `replacements`. Spans must be sorted; a span whose bytes
/// overlap an earlier replaced span is left untouched.
std::string splice_spans(const TokenizedText& text, std::span<const EntitySpan> spans,
                         std::span<const std::string> replacements);

// Byte range covered by a span of tokens.
SourceRange span_range(const TokenizedText& text, const EntitySpan& span);

}  // namespace molhallu
