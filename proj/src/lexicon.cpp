#include "molhallu/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "molhallu/errors.hpp"
#include "molhallu/textproc.hpp"

namespace molhallu {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::Application: return "Application";
    case EntityType::Property: return "Property";
    case EntityType::Source: return "Source";
    case EntityType::Structure: return "Structure";
  }
  return "Structure";
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
  const std::string lowered = lower_ascii(trim(name));
  for (EntityType type : kEntityTypes) {
    if (lower_ascii(to_string(type)) == lowered) return type;
  }
  return std::nullopt;
}

nlohmann::ordered_json LoadReport::to_json() const {
  nlohmann::ordered_json j;
  j["loaded"] = loaded;
  j["skipped_unknown_type"] = skipped_unknown_type;
  j["skipped_empty"] = skipped_empty;
  j["duplicates"] = duplicates;
  return j;
}

bool EntityLexicon::Builder::add(std::string_view surface, EntityType type) {
  EntityRecord record;
  record.surface = std::string(trim(surface));
  record.normalized = normalize_surface(surface);
  record.type = type;
  record.tokens = tokenize(surface).tokens;
  if (record.normalized.empty() || record.tokens.empty()) {
    ++report_.skipped_empty;
    return false;
  }
  std::string key = ngram_key(record.tokens);
  if (auto it = by_key_.find(key); it != by_key_.end()) {
    ++report_.duplicates;
    report_.warnings.push_back("duplicate entity '" + record.surface + "' (first seen as '" +
                               records_[it->second].surface + "')");
    return false;
  }
  record.id = static_cast<RecordId>(records_.size());
  by_key_.emplace(std::move(key), record.id);
  records_.push_back(std::move(record));
  ++report_.loaded;
  return true;
}

void EntityLexicon::Builder::skip_unknown_type(std::string_view type_name, std::size_t line) {
  ++report_.skipped_unknown_type;
  report_.warnings.push_back("line " + std::to_string(line) + ": unknown entity type '" +
                             std::string(type_name) + "'");
}

EntityLexicon EntityLexicon::Builder::build() && {
  if (records_.empty()) throw ValidationError("lexicon contains no valid entity rows");
  EntityLexicon lexicon;
  lexicon.trie_.emplace_back();
  lexicon.records_ = std::move(records_);
  for (const auto& record : lexicon.records_) {
    lexicon.index_record(record);
    const auto slot = static_cast<std::size_t>(record.type);
    ++lexicon.type_counts_[slot];
    lexicon.pools_[slot].push_back(record.id);
  }
  lexicon.report_ = std::move(report_);
  return lexicon;
}

void EntityLexicon::index_record(const EntityRecord& record) {
  std::uint32_t node = 0;
  for (const auto& token : record.tokens) {
    auto it = trie_[node].next.find(token);
    if (it == trie_[node].next.end()) {
      const auto child = static_cast<std::uint32_t>(trie_.size());
      trie_[node].next.emplace(token, child);
      trie_.emplace_back();
      node = child;
    } else {
      node = it->second;
    }
  }
  trie_[node].record = record.id;
}

std::optional<LexiconMatch> EntityLexicon::lookup_longest(std::span<const std::string> tokens,
                                                          std::size_t start) const {
  if (start >= tokens.size()) {
    throw std::out_of_range("lookup_longest: start is past the end of the token sequence");
  }
  if (trie_.empty()) return std::nullopt;
  std::optional<LexiconMatch> best;
  std::uint32_t node = 0;
  for (std::size_t pos = start; pos < tokens.size(); ++pos) {
    auto it = trie_[node].next.find(tokens[pos]);
    if (it == trie_[node].next.end()) break;
    node = it->second;
    if (trie_[node].record) best = LexiconMatch{*trie_[node].record, pos - start + 1};
  }
  return best;
}

std::optional<RecordId> EntityLexicon::find(std::span<const std::string> tokens) const {
  if (tokens.empty()) return std::nullopt;
  auto match = lookup_longest(tokens, 0);
  if (match && match->length == tokens.size()) return match->id;
  return std::nullopt;
}

std::optional<LexiconFormat> parse_lexicon_format(std::string_view name) {
  const std::string lowered = lower_ascii(name);
  if (lowered == "tsv") return LexiconFormat::Tsv;
  if (lowered == "jsonl") return LexiconFormat::Jsonl;
  return std::nullopt;
}

LexiconFormat infer_lexicon_format(const std::filesystem::path& path) {
  const std::string ext = lower_ascii(path.extension().string());
  return (ext == ".jsonl" || ext == ".json") ? LexiconFormat::Jsonl : LexiconFormat::Tsv;
}

EntityLexicon parse_lexicon(std::istream& in, LexiconFormat format) {
  EntityLexicon::Builder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::string surface;
    std::string type_name;
    if (format == LexiconFormat::Tsv) {
      if (trim(line).front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ValidationError("lexicon line " + std::to_string(line_no) +
                              ": expected 'surface<TAB>type'");
      }
      surface = line.substr(0, tab);
      type_name = std::string(trim(std::string_view(line).substr(tab + 1)));
      if (line_no == 1 && lower_ascii(trim(surface)) == "surface" && lower_ascii(type_name) == "type") {
        continue;
      }
    } else {
      nlohmann::json row;
      try {
        row = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("lexicon line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!row.is_object() || !row.contains("surface") || !row.contains("type") ||
          !row["surface"].is_string() || !row["type"].is_string()) {
        throw ValidationError("lexicon line " + std::to_string(line_no) +
                              ": expected {\"surface\": string, \"type\": string}");
      }
      surface = row["surface"].get<std::string>();
      type_name = row["type"].get<std::string>();
    }

    if (auto type = parse_entity_type(type_name)) {
      builder.add(surface, *type);
    } else {
      builder.skip_unknown_type(type_name, line_no);
    }
  }
  if (in.bad()) throw IoError("failed while reading lexicon");
  return std::move(builder).build();
}

EntityLexicon load_lexicon(const std::filesystem::path& path, LexiconFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file " + path.string());
  return parse_lexicon(in, format);
}

std::optional<RecordId> sample_replacement(EntityType type, std::span<const RecordId> exclude,
                                           Rng& rng, const EntityLexicon& lexicon) {
  const auto pool = lexicon.pool(type);
  // Positions of excluded ids inside the (sorted) pool.
  std::vector<std::size_t> skipped;
  for (RecordId id : exclude) {
    auto it = std::lower_bound(pool.begin(), pool.end(), id);
    if (it != pool.end() && *it == id) {
      skipped.push_back(static_cast<std::size_t>(it - pool.begin()));
    }
  }
  std::sort(skipped.begin(), skipped.end());
  skipped.erase(std::unique(skipped.begin(), skipped.end()), skipped.end());

  const std::size_t available = pool.size() - skipped.size();
  if (available == 0) return std::nullopt;
  std::size_t index = rng.uniform(available);
  for (std::size_t pos : skipped) {
    if (pos <= index) ++index;
  }
  return pool[index];
}

nlohmann::ordered_json TypeRates::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  nlohmann::ordered_json rates;
  for (EntityType type : kEntityTypes) {
    rates[std::string(to_string(type))] = percent[static_cast<std::size_t>(type)];
  }
  j["percent"] = rates;
  return j;
}

TypeRates lexicon_stats(const EntityLexicon& lexicon) {
  if (lexicon.empty()) throw ValidationError("lexicon_stats: empty lexicon");
  TypeRates rates;
  rates.total = lexicon.size();
  for (std::size_t i = 0; i < kEntityTypeCount; ++i) {
    rates.percent[i] =
        100.0 * static_cast<double>(lexicon.type_counts()[i]) / static_cast<double>(rates.total);
  }
  return rates;
}

}  // namespace molhallu
