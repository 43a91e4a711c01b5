#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "molhallu/random.hpp"

namespace molhallu {

enum class EntityType : std::uint8_t { Application = 0, Property = 1, Source = 2, Structure = 3 };

inline constexpr std::size_t kEntityTypeCount = 4;
inline constexpr std::array<EntityType, kEntityTypeCount> kEntityTypes = {
    EntityType::Application, EntityType::Property, EntityType::Source, EntityType::Structure};

std::string_view to_string(EntityType type);

// Case-insensitive; accepts exactly the four type names.
std::optional<EntityType> parse_entity_type(std::string_view name);

// A set of entity types, indexed by the enum value.
using TypeSet = std::bitset<kEntityTypeCount>;

inline TypeSet all_types() { return TypeSet{}.set(); }

inline bool contains(const TypeSet& set, EntityType type) {
  return set.test(static_cast<std::size_t>(type));
}

// Lowercase, NFKC, whitespace runs collapsed to one space, trimmed.
// Hyphens and parentheses are kept as-is.
std::string normalize_surface(std::string_view raw);

using RecordId = std::uint32_t;

struct EntityRecord {
  std::string surface;
  std::string normalized;
  EntityType type = EntityType::Structure;
  RecordId id = 0;
  // Token sequence used for matching; tokenize(surface).tokens.
  std::vector<std::string> tokens;
};

struct LoadReport {
  std::size_t loaded = 0;
  std::size_t skipped_unknown_type = 0;
  std::size_t skipped_empty = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

struct LexiconMatch {
  RecordId id = 0;
  std::size_t length = 0;  // in tokens

  friend bool operator==(const LexiconMatch&, const LexiconMatch&) = default;
};

/// Chemical-entity dictionary with a token-level prefix index.
///
/// Records are keyed by their normalized token sequence; the first
/// occurrence of a sequence wins and later ones are counted as duplicates.
/// Ids are assigned densely in load order. The lexicon is immutable once
/// built and can be shared across threads.
class EntityLexicon {
 public:
  class Builder {
   public:
    // Returns false when the row was skipped (empty or duplicate); the
    // reason is tallied in the report.
    bool add(std::string_view surface, EntityType type);
    // Counts a row with an unrecognized type.
    void skip_unknown_type(std::string_view type_name, std::size_t line);

    const LoadReport& report() const { return report_; }

    // Throws ValidationError when no record was accepted.
    EntityLexicon build() &&;

   private:
    std::vector<EntityRecord> records_;
    std::unordered_map<std::string, RecordId> by_key_;
    LoadReport report_;
  };

  EntityLexicon() = default;

  /// Longest entry whose token sequence equals tokens[start, start + k).
  std::optional<LexiconMatch> lookup_longest(std::span<const std::string> tokens,
                                             std::size_t start) const;

  /// Exact lookup of a full token sequence.
  std::optional<RecordId> find(std::span<const std::string> tokens) const;

  const EntityRecord& record(RecordId id) const { return records_.at(id); }
  std::span<const EntityRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const std::array<std::size_t, kEntityTypeCount>& type_counts() const { return type_counts_; }

  // Record ids of one type, ascending.
  std::span<const RecordId> pool(EntityType type) const {
    return pools_[static_cast<std::size_t>(type)];
  }

  const LoadReport& load_report() const { return report_; }

 private:
  struct TrieNode {
    std::unordered_map<std::string, std::uint32_t> next;
    std::optional<RecordId> record;
  };

  void index_record(const EntityRecord& record);

  std::vector<EntityRecord> records_;
  std::vector<TrieNode> trie_;
  std::array<std::size_t, kEntityTypeCount> type_counts_{};
  std::array<std::vector<RecordId>, kEntityTypeCount> pools_;
  LoadReport report_;
};

enum class LexiconFormat { Tsv, Jsonl };

std::optional<LexiconFormat> parse_lexicon_format(std::string_view name);

// Guesses from the extension: .jsonl/.json -> Jsonl, anything else -> Tsv.
LexiconFormat infer_lexicon_format(const std::filesystem::path& path);

/// Parses a lexicon from a stream.
///
/// TSV rows are `surface<TAB>type`; blank lines, `#` comments and a
/// `surface<TAB>type` header are ignored. JSONL rows are
/// `{"surface": ..., "type": ...}`. A structurally malformed row is a
/// ValidationError; rows with an unknown type or an empty surface are skipped
/// and counted in the load report.
EntityLexicon parse_lexicon(std::istream& in, LexiconFormat format);

EntityLexicon load_lexicon(const std::filesystem::path& path, LexiconFormat format);

/// Uniformly draws a record of `type` whose id is not in `exclude`.
/// Returns nullopt when no such record exists, which callers treat as
/// "leave this entity alone".
std::optional<RecordId> sample_replacement(EntityType type, std::span<const RecordId> exclude,
                                           Rng& rng, const EntityLexicon& lexicon);

struct TypeRates {
  // Percent of records per type, indexed like kEntityTypes.
  std::array<double, kEntityTypeCount> percent{};
  std::size_t total = 0;

  nlohmann::ordered_json to_json() const;
};

// Throws ValidationError on an empty lexicon.
TypeRates lexicon_stats(const EntityLexicon& lexicon);

}  // namespace molhallu
