#include "molhallu/textproc.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <stdexcept>
#include <string>

#include "molhallu/errors.hpp"

namespace molhallu {

namespace {

bool is_sentence_punct(std::string_view s) {
  return s.size() == 1 && std::string_view(".,;:!?").find(s[0]) != std::string_view::npos;
}

// Start offset of the code point that ends at `end`.
std::size_t previous_code_point(std::string_view text, std::size_t begin, std::size_t end) {
  int32_t offset = static_cast<int32_t>(end);
  U8_BACK_1(reinterpret_cast<const uint8_t*>(text.data()), static_cast<int32_t>(begin), offset);
  return static_cast<std::size_t>(offset);
}

void split_normalized(const std::string& normalized, SourceRange range, TokenizedText& out) {
  std::size_t pos = 0;
  while (pos < normalized.size()) {
    std::size_t next = normalized.find(' ', pos);
    if (next == std::string::npos) next = normalized.size();
    if (next > pos) {
      out.tokens.push_back(normalized.substr(pos, next - pos));
      out.ranges.push_back(range);
    }
    pos = next + 1;
  }
}

void tokenize_word(std::string_view text, std::size_t begin, std::size_t end, TokenizedText& out) {
  std::vector<std::pair<std::string, SourceRange>> peeled;
  std::size_t core_end = end;
  while (true) {
    const std::size_t last = previous_code_point(text, begin, core_end);
    if (last == begin) break;  // keep at least one code point as the core
    std::string normalized = normalize_surface(text.substr(last, core_end - last));
    if (!is_sentence_punct(normalized)) break;
    peeled.emplace_back(std::move(normalized), SourceRange{last, core_end});
    core_end = last;
  }

  split_normalized(normalize_surface(text.substr(begin, core_end - begin)), {begin, core_end}, out);
  for (auto it = peeled.rbegin(); it != peeled.rend(); ++it) {
    out.tokens.push_back(std::move(it->first));
    out.ranges.push_back(it->second);
  }
}

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.source = std::string(text);

  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t pos = 0;
  std::size_t word_begin = 0;
  bool in_word = false;
  while (pos < length) {
    const int32_t start = pos;
    UChar32 c = 0;
    U8_NEXT(bytes, pos, length, c);
    const bool space = c >= 0 && u_isUWhiteSpace(c);
    if (space && in_word) {
      tokenize_word(text, word_begin, static_cast<std::size_t>(start), out);
      in_word = false;
    } else if (!space && !in_word) {
      word_begin = static_cast<std::size_t>(start);
      in_word = true;
    }
  }
  if (in_word) tokenize_word(text, word_begin, text.size(), out);
  return out;
}

std::size_t NGramMultiset::total() const {
  std::size_t sum = 0;
  for (const auto& [key, count] : counts) sum += count;
  return sum;
}

std::size_t NGramMultiset::count(std::string_view key) const {
  auto it = counts.find(std::string(key));
  return it == counts.end() ? 0 : it->second;
}

std::string ngram_key(std::span<const std::string> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) key.push_back(' ');
    key += tokens[i];
  }
  return key;
}

NGramMultiset extract_ngrams(std::span<const std::string> tokens, int order) {
  if (order < 1 || order > kMaxOrder) {
    throw ValidationError("n-gram order must be in 1..4, got " + std::to_string(order));
  }
  NGramMultiset out;
  out.order = order;
  const auto n = static_cast<std::size_t>(order);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out.counts[ngram_key(tokens.subspan(i, n))];
  }
  return out;
}

std::vector<EntitySpan> extract_entities(std::span<const std::string> tokens,
                                         const EntityLexicon& lexicon) {
  std::vector<EntitySpan> spans;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    if (auto match = lexicon.lookup_longest(tokens, pos)) {
      spans.push_back({pos, match->length, match->id});
      pos += match->length;
    } else {
      ++pos;
    }
  }
  return spans;
}

SourceRange span_range(const TokenizedText& text, const EntitySpan& span) {
  return {text.ranges.at(span.start).begin, text.ranges.at(span.end() - 1).end};
}

std::string splice_spans(const TokenizedText& text, std::span<const EntitySpan> spans,
                         std::span<const std::string> replacements) {
  if (spans.size() != replacements.size()) {
    throw std::invalid_argument("splice_spans: one replacement per span required");
  }
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const SourceRange range = span_range(text, spans[i]);
    if (range.begin < cursor) continue;
    out.append(text.source, cursor, range.begin - cursor);
    out += replacements[i];
    cursor = range.end;
  }
  out.append(text.source, cursor, std::string::npos);
  return out;
}

}  // namespace molhallu
