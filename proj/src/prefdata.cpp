#include "molhallu/prefdata.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "molhallu/errors.hpp"
#include "molhallu/textproc.hpp"

namespace molhallu {

nlohmann::ordered_json SftPair::to_json() const {
  nlohmann::ordered_json j;
  j["question"] = question;
  j["answer"] = answer;
  return j;
}

std::vector<SftPair> build_sft_dataset(std::span<const CorpusRecord> records,
                                       const EntityLexicon& lexicon) {
  std::vector<SftPair> pairs;
  pairs.reserve(records.size());
  for (const auto& record : records) {
    pairs.push_back({mask_drug_names(record.question, lexicon).text, record.answer_gt});
  }
  return pairs;
}

std::optional<PerturbResult> perturb_entities(std::string_view answer, const EntityLexicon& lexicon,
                                              std::optional<std::size_t> k, Rng& rng) {
  const TokenizedText text = tokenize(answer);
  std::vector<EntitySpan> candidates;
  for (const auto& span : extract_entities(text.tokens, lexicon)) {
    if (lexicon.pool(lexicon.record(span.record_id).type).size() > 1) candidates.push_back(span);
  }
  if (candidates.empty()) return std::nullopt;

  const std::size_t available = candidates.size();
  std::size_t count = k ? std::min(*k, available) : rng.uniform_between(1, (available + 1) / 2);
  if (count == 0) return std::nullopt;

  // Partial Fisher-Yates over candidate positions.
  std::vector<std::size_t> order(available);
  for (std::size_t i = 0; i < available; ++i) order[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + rng.uniform(available - i)]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  PerturbResult result;
  std::vector<EntitySpan> spans;
  std::vector<std::string> substitutes;
  for (std::size_t index : chosen) {
    const EntitySpan& span = candidates[index];
    const EntityRecord& original = lexicon.record(span.record_id);
    const RecordId exclude[] = {original.id};
    const auto pick = sample_replacement(original.type, exclude, rng, lexicon);
    if (!pick) continue;  // unreachable: pools of size > 1 always have a pick
    const SourceRange r = span_range(text, span);
    const std::string& substitute = lexicon.record(*pick).surface;
    result.replacements.push_back(
        {text.source.substr(r.begin, r.end - r.begin), substitute, original.type});
    spans.push_back(span);
    substitutes.push_back(substitute);
  }
  result.text = splice_spans(text, spans, substitutes);
  return result;
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::EntityPerturbed ? "entity-perturbed" : "external-sampled";
}

nlohmann::ordered_json PreferenceTriple::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["question"] = question;
  j["g_plus"] = g_plus;
  auto negatives = nlohmann::ordered_json::array();
  for (const auto& n : g_minus) {
    nlohmann::ordered_json e;
    e["text"] = n.text;
    e["provenance"] = std::string(to_string(n.provenance));
    negatives.push_back(std::move(e));
  }
  j["g_minus"] = std::move(negatives);
  return j;
}

ExternalNegatives parse_external_negatives(std::istream& in) {
  ExternalNegatives out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto where = "external negatives line " + std::to_string(line_no) + ": ";
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(where + e.what());
    }
    if (!row.is_object() || !row.contains("id") || !row["id"].is_string() ||
        !row.contains("texts") || !row["texts"].is_array()) {
      throw ValidationError(where + "expected {\"id\": string, \"texts\": [string, ...]}");
    }
    auto& texts = out[row["id"].get<std::string>()];
    for (const auto& t : row["texts"]) {
      if (!t.is_string()) throw ValidationError(where + "texts must be strings");
      texts.push_back(t.get<std::string>());
    }
  }
  if (in.bad()) throw IoError("failed while reading external negatives");
  return out;
}

ExternalNegatives read_external_negatives(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open external negatives file " + path.string());
  return parse_external_negatives(in);
}

nlohmann::ordered_json PreferenceReport::to_json() const {
  nlohmann::ordered_json j;
  j["corpus_size"] = corpus_size;
  j["sampled"] = sampled;
  j["emitted"] = emitted;
  j["dropped_no_negatives"] = dropped_no_negatives;
  j["rejected_negatives"] = rejected_negatives;
  j["external_negatives"] = external_negatives;
  return j;
}

PreferenceDataset build_preference_dataset(std::span<const CorpusRecord> records,
                                           const EntityLexicon& lexicon,
                                           const PreferenceConfig& config,
                                           const ExternalNegatives* external) {
  config.scoring.validate();
  if (config.sample_count == 0) throw ValidationError("sample count must be positive");
  if (records.size() < config.sample_count && !config.allow_smaller) {
    throw ValidationError("corpus has " + std::to_string(records.size()) +
                          " records but " + std::to_string(config.sample_count) +
                          " were requested (allow a smaller sample to proceed)");
  }

  PreferenceDataset dataset;
  dataset.report.corpus_size = records.size();

  const std::size_t take = std::min(config.sample_count, records.size());
  std::vector<std::size_t> indices(records.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Rng sampler(derive_seed(config.seed, "sample"));
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(indices[i], indices[i + sampler.uniform(indices.size() - i)]);
  }
  indices.resize(take);
  std::sort(indices.begin(), indices.end());
  dataset.report.sampled = take;

  for (std::size_t index : indices) {
    const CorpusRecord& record = records[index];
    PreferenceTriple triple;
    triple.id = record.id;
    triple.question = mask_drug_names(record.question, lexicon).text;
    triple.g_plus = record.answer_gt;

    ScoringSample probe{record.id, record.smiles, record.question, record.answer_gt,
                        record.answer_gt, record.description.value_or("")};
    const double positive_f1 = score_sample(probe, lexicon, config.scoring).f1;

    Rng rng(derive_seed(config.seed, record.id));
    std::unordered_set<std::string> seen{record.answer_gt};
    for (std::size_t n = 0; n < config.negatives_per_sample; ++n) {
      for (std::size_t attempt = 0; attempt < config.max_attempts; ++attempt) {
        auto perturbed = perturb_entities(record.answer_gt, lexicon, config.k, rng);
        if (!perturbed) break;
        if (!seen.insert(perturbed->text).second) continue;
        probe.answer_pred = perturbed->text;
        if (score_sample(probe, lexicon, config.scoring).f1 >= positive_f1) {
          ++dataset.report.rejected_negatives;
          continue;
        }
        triple.g_minus.push_back({std::move(perturbed->text), Provenance::EntityPerturbed});
        break;
      }
    }

    if (external != nullptr) {
      if (auto it = external->find(record.id); it != external->end()) {
        for (const auto& text : it->second) {
          triple.g_minus.push_back({text, Provenance::ExternalSampled});
          ++dataset.report.external_negatives;
        }
      }
    }

    if (triple.g_minus.empty()) {
      ++dataset.report.dropped_no_negatives;
      continue;
    }
    dataset.triples.push_back(std::move(triple));
  }
  dataset.report.emitted = dataset.triples.size();
  return dataset;
}

std::string dataset_readme() {
  return R"(# Hallucination-sensitive training data

Files written by `molhallu prefs` and `molhallu sft`. Nothing here is trained
by the toolkit; the files are inputs for an external trainer.

## sft.jsonl

One object per line: `{"question": ..., "answer": ...}`.
Every lexicon entity in the question is replaced by "this molecule" so a model
cannot map entity names straight to answers. The answer is the unmodified
ground truth.

Intended objective: token-level cross-entropy over the answer,

    L_CE = - sum_i sum_t log P(answer_i[t] | question_i, answer_i[<t])

## preferences.jsonl

One object per line:

    {"id": ..., "question": ..., "g_plus": ...,
     "g_minus": [{"text": ..., "provenance": "entity-perturbed" | "external-sampled"}]}

- `question` is entity-masked as in sft.jsonl.
- `g_plus` is the ground-truth answer.
- `entity-perturbed` negatives swap one or more entities of the ground truth
  for different entities of the same type from the lexicon. Each one scores
  strictly lower than the ground truth under the Mol-Hallu metric.
- `external-sampled` negatives are model responses supplied through
  `--external` (JSONL `{"id": ..., "texts": [...]}`), copied verbatim.

Intended objective: direct preference optimization against a frozen reference
model P_ref with temperature beta,

    L_DPO = - sum_i log sigmoid( beta * log( P(g+|q) P_ref(g-|q) / (P(g-|q) P_ref(g+|q)) ) )

applied to every (g_plus, g_minus[j]) pair.

## preferences_report.json

Counts of sampled, emitted and dropped records, rejected perturbations and
merged external negatives.
)";
}

}  // namespace molhallu
