#pragma once

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
#include "molhallu/attacks.hpp"
#include "molhallu/corpus.hpp"
#include "molhallu/lexicon.hpp"
#include "molhallu/mol_hallu.hpp"
#include "molhallu/random.hpp"

namespace molhallu {

struct SftPair {
  std::string question;
  std::string answer;

  nlohmann::ordered_json to_json() const;
};

// One pair per record, question entity-masked, answer_gt untouched.
std::vector<SftPair> build_sft_dataset(std::span<const CorpusRecord> records,
                                       const EntityLexicon& lexicon);

struct PerturbResult {
  std::string text;
  std::vector<Replacement> replacements;
};

/// Replaces min(k, available) randomly chosen entities in `answer` with other
/// lexicon entities of the same type. Only entities that have a same-type
/// alternative count as available. With no k, k is drawn uniformly from
/// 1..ceil(available / 2). Returns nullopt when nothing can be perturbed.
std::optional<PerturbResult> perturb_entities(std::string_view answer, const EntityLexicon& lexicon,
                                              std::optional<std::size_t> k, Rng& rng);

enum class Provenance { EntityPerturbed, ExternalSampled };

std::string_view to_string(Provenance provenance);

struct Negative {
  std::string text;
  Provenance provenance = Provenance::EntityPerturbed;
};

struct PreferenceTriple {
  std::string id;
  std::string question;  // entity-masked
  std::string g_plus;
  std::vector<Negative> g_minus;

  nlohmann::ordered_json to_json() const;
};

// id -> model-sampled responses, from a JSONL file of {"id", "texts": [...]}.
using ExternalNegatives = std::unordered_map<std::string, std::vector<std::string>>;

ExternalNegatives parse_external_negatives(std::istream& in);
ExternalNegatives read_external_negatives(const std::filesystem::path& path);

struct PreferenceConfig {
  std::size_t sample_count = 2000;
  std::size_t negatives_per_sample = 1;
  // Entities replaced per negative; nullopt draws it per negative.
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  bool allow_smaller = false;
  // Attempts per requested negative before giving up on it.
  std::size_t max_attempts = 8;
  ScoringConfig scoring;
};

struct PreferenceReport {
  std::size_t corpus_size = 0;
  std::size_t sampled = 0;
  std::size_t emitted = 0;
  std::size_t dropped_no_negatives = 0;
  // Perturbations discarded because they did not score below the positive.
  std::size_t rejected_negatives = 0;
  std::size_t external_negatives = 0;

  nlohmann::ordered_json to_json() const;
};

struct PreferenceDataset {
  std::vector<PreferenceTriple> triples;
  PreferenceReport report;
};

/// Builds (masked question, G+, G-) triples.
///
/// Records are sampled uniformly without replacement and emitted in input
/// order. Each entity-perturbed negative is re-scored against the record's
/// ground truth and description and kept only if its F1 is strictly below
/// the ground truth's own. External negatives are appended as given. Records
/// left without any negative are dropped and counted.
PreferenceDataset build_preference_dataset(std::span<const CorpusRecord> records,
                                           const EntityLexicon& lexicon,
                                           const PreferenceConfig& config,
                                           const ExternalNegatives* external = nullptr);

// Companion README describing the file formats and the training objectives
// the artifacts are meant for.
std::string dataset_readme();

}  // namespace molhallu
