#include "molhallu/attacks.hpp"

#include <algorithm>

#include "molhallu/textproc.hpp"

namespace molhallu {

namespace {

std::vector<EntitySpan> selected_spans(const TokenizedText& text, const EntityLexicon& lexicon,
                                       const TypeSet& types) {
  auto spans = extract_entities(text.tokens, lexicon);
  std::erase_if(spans, [&](const EntitySpan& s) {
    return !contains(types, lexicon.record(s.record_id).type);
  });
  return spans;
}

bool inside_any(const SourceRange& range, std::span<const SourceRange> ranges) {
  return std::any_of(ranges.begin(), ranges.end(), [&](const SourceRange& p) {
    return p.begin <= range.begin && range.end <= p.end;
  });
}

// Parts of `range` not covered by any of the sorted, disjoint `cuts`.
std::vector<SourceRange> subtract(SourceRange range, std::span<const SourceRange> cuts) {
  std::vector<SourceRange> pieces;
  std::size_t pos = range.begin;
  for (const auto& cut : cuts) {
    if (cut.end <= pos || cut.begin >= range.end) continue;
    if (cut.begin > pos) pieces.push_back({pos, cut.begin});
    pos = std::max(pos, cut.end);
  }
  if (pos < range.end) pieces.push_back({pos, range.end});
  return pieces;
}

nlohmann::ordered_json types_json(const TypeSet& types) {
  auto j = nlohmann::ordered_json::array();
  for (EntityType t : kEntityTypes) {
    if (contains(types, t)) j.push_back(std::string(to_string(t)));
  }
  return j;
}

}  // namespace

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::DrugMask: return "drug-mask";
    case AttackKind::DrugDistract: return "drug-distract";
    case AttackKind::MoleculeMask: return "molecule-mask";
  }
  return "drug-mask";
}

std::optional<AttackKind> parse_attack_kind(std::string_view name) {
  for (AttackKind kind : {AttackKind::DrugMask, AttackKind::DrugDistract, AttackKind::MoleculeMask}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

nlohmann::ordered_json Replacement::to_json() const {
  nlohmann::ordered_json j;
  j["original"] = original;
  j["substitute"] = substitute ? nlohmann::ordered_json(*substitute) : nlohmann::ordered_json(nullptr);
  if (type) j["type"] = std::string(to_string(*type));
  return j;
}

MaskResult mask_drug_names(std::string_view question, const EntityLexicon& lexicon,
                           const TypeSet& types) {
  MaskResult result;
  result.text = std::string(question);
  // Byte ranges in result.text produced by earlier masking rounds.
  std::vector<SourceRange> masked;

  // Every round replaces at least one token outside `masked` and adds only
  // masked bytes, so the loop terminates.
  while (true) {
    const TokenizedText text = tokenize(result.text);
    auto spans = selected_spans(text, lexicon, types);
    std::erase_if(spans, [&](const EntitySpan& s) {
      for (std::size_t t = s.start; t < s.end(); ++t) {
        if (!inside_any(text.ranges[t], masked)) return false;
      }
      return true;
    });
    if (spans.empty()) break;

    std::vector<SourceRange> replaced;
    for (const auto& span : spans) {
      const SourceRange r = span_range(text, span);
      if (!replaced.empty() && r.begin < replaced.back().end) continue;
      replaced.push_back(r);
      result.replacements.push_back({text.source.substr(r.begin, r.end - r.begin),
                                     std::string(kMaskPhrase), lexicon.record(span.record_id).type});
      ++result.replaced;
    }

    std::string out;
    std::vector<SourceRange> next_masked;
    std::size_t cursor = 0;
    for (const auto& r : replaced) {
      out.append(text.source, cursor, r.begin - cursor);
      next_masked.push_back({out.size(), out.size() + kMaskPhrase.size()});
      out += kMaskPhrase;
      cursor = r.end;
    }
    out.append(text.source, cursor, std::string::npos);

    // Shift surviving pieces of older masks into the new string.
    auto shifted = [&](std::size_t pos) {
      std::ptrdiff_t delta = 0;
      for (const auto& r : replaced) {
        if (r.end <= pos) {
          delta += static_cast<std::ptrdiff_t>(kMaskPhrase.size()) -
                   static_cast<std::ptrdiff_t>(r.end - r.begin);
        }
      }
      return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pos) + delta);
    };
    for (const auto& m : masked) {
      for (const auto& piece : subtract(m, replaced)) {
        const std::size_t begin = shifted(piece.begin);
        next_masked.push_back({begin, begin + (piece.end - piece.begin)});
      }
    }

    result.text = std::move(out);
    masked = std::move(next_masked);
  }
  return result;
}

DistractResult distract_drug_names(std::string_view question, const EntityLexicon& lexicon,
                                   Rng& rng, const TypeSet& types) {
  const TokenizedText text = tokenize(question);
  const auto spans = selected_spans(text, lexicon, types);

  DistractResult result;
  std::vector<EntitySpan> applied;
  std::vector<std::string> substitutes;
  for (const auto& span : spans) {
    const EntityRecord& original = lexicon.record(span.record_id);
    const SourceRange r = span_range(text, span);
    Replacement replacement{text.source.substr(r.begin, r.end - r.begin), std::nullopt, original.type};
    const RecordId exclude[] = {original.id};
    if (auto pick = sample_replacement(original.type, exclude, rng, lexicon)) {
      replacement.substitute = lexicon.record(*pick).surface;
      applied.push_back(span);
      substitutes.push_back(*replacement.substitute);
    }
    result.replacements.push_back(std::move(replacement));
  }
  result.text = splice_spans(text, applied, substitutes);
  return result;
}

ScoringSample mask_molecule(ScoringSample sample) {
  sample.smiles.clear();
  return sample;
}

CorpusRecord mask_molecule(CorpusRecord record) {
  record.smiles.clear();
  return record;
}

AttackOutput attack_corpus(std::span<const CorpusRecord> records, AttackKind kind,
                           std::uint64_t seed, const EntityLexicon& lexicon, const TypeSet& types) {
  AttackOutput output;
  output.records.reserve(records.size());
  auto per_sample = nlohmann::ordered_json::array();

  for (const auto& record : records) {
    CorpusRecord attacked = record;
    std::vector<Replacement> replacements;
    switch (kind) {
      case AttackKind::DrugMask: {
        auto masked = mask_drug_names(record.question, lexicon, types);
        attacked.question = std::move(masked.text);
        replacements = std::move(masked.replacements);
        break;
      }
      case AttackKind::DrugDistract: {
        Rng rng(derive_seed(seed, record.id));
        auto distracted = distract_drug_names(record.question, lexicon, rng, types);
        attacked.question = std::move(distracted.text);
        replacements = std::move(distracted.replacements);
        break;
      }
      case AttackKind::MoleculeMask:
        if (!record.smiles.empty()) replacements.push_back({record.smiles, std::string(), std::nullopt});
        attacked = mask_molecule(record);
        break;
    }

    nlohmann::ordered_json entry;
    entry["id"] = record.id;
    entry["count"] = std::count_if(replacements.begin(), replacements.end(),
                                   [](const Replacement& r) { return r.substitute.has_value(); });
    auto replaced = nlohmann::ordered_json::array();
    for (const auto& r : replacements) replaced.push_back(r.to_json());
    entry["replaced"] = std::move(replaced);
    per_sample.push_back(std::move(entry));
    output.records.push_back(std::move(attacked));
  }

  output.manifest["seed"] = seed;
  output.manifest["kind"] = std::string(to_string(kind));
  output.manifest["types"] = types_json(types);
  if (kind == AttackKind::DrugDistract) {
    output.manifest["substitution"] =
        "each entity replaced by a different lexicon entity of the same type";
  }
  output.manifest["per_sample"] = std::move(per_sample);
  return output;
}

}  // namespace molhallu
