#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "molhallu/corpus.hpp"
#include "molhallu/lexicon.hpp"
#include "molhallu/mol_hallu.hpp"
#include "molhallu/random.hpp"

namespace molhallu {

enum class AttackKind { DrugMask, DrugDistract, MoleculeMask };

std::string_view to_string(AttackKind kind);
// Accepts drug-mask, drug-distract and molecule-mask.
std::optional<AttackKind> parse_attack_kind(std::string_view name);

inline constexpr std::string_view kMaskPhrase = "this molecule";

struct Replacement {
  std::string original;
  // nullopt when no substitute was available and the text was left as is.
  std::optional<std::string> substitute;
  std::optional<EntityType> type;

  nlohmann::ordered_json to_json() const;
};

struct MaskResult {
  std::string text;
  std::size_t replaced = 0;
  std::vector<Replacement> replacements;
};

/// Replaces every lexicon entity of the selected types with "this molecule".
///
/// Masking repeats until no entity remains outside the inserted phrases, so
/// entities that only appear after a substitution (an entry such as
/// "molecule x" meeting a following "x") are masked too. Entities made up
/// entirely of the mask phrase's own words cannot be removed and are left.
MaskResult mask_drug_names(std::string_view question, const EntityLexicon& lexicon,
                           const TypeSet& types = all_types());

struct DistractResult {
  std::string text;
  std::vector<Replacement> replacements;
};

/// Swaps each matched entity for a different lexicon entity of the same type.
DistractResult distract_drug_names(std::string_view question, const EntityLexicon& lexicon,
                                   Rng& rng, const TypeSet& types = all_types());

ScoringSample mask_molecule(ScoringSample sample);
CorpusRecord mask_molecule(CorpusRecord record);

struct AttackOutput {
  std::vector<CorpusRecord> records;
  nlohmann::ordered_json manifest;
};

/// Applies one attack to every record. Randomness is drawn from a stream
/// seeded by (seed, record id), so output does not depend on record order.
AttackOutput attack_corpus(std::span<const CorpusRecord> records, AttackKind kind,
                           std::uint64_t seed, const EntityLexicon& lexicon,
                           const TypeSet& types = all_types());

}  // namespace molhallu
