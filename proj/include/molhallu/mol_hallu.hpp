#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "molhallu/lexicon.hpp"
#include "molhallu/textproc.hpp"

namespace molhallu {

inline constexpr double kDefaultTheta = 1e-5;

// How gamma splits precision between the non-entity and entity terms.
//   AsPrinted: P = gamma * P_nonentity + (1 - gamma) * P_entity
//   Inverted:  P = (1 - gamma) * P_nonentity + gamma * P_entity
enum class GammaOrientation { AsPrinted, Inverted };

std::string_view to_string(GammaOrientation orientation);
std::optional<GammaOrientation> parse_gamma_orientation(std::string_view name);

struct ScoringConfig {
  double theta = kDefaultTheta;
  GammaOrientation orientation = GammaOrientation::AsPrinted;

  // Throws ValidationError unless 0 < theta < 1.
  void validate() const;
};

struct ScoringSample {
  std::string id;
  std::string smiles;
  std::string question;
  std::string answer_pred;
  std::string answer_gt;
  std::string description;
};

// A per-order value; nullopt marks an order with nothing to measure.
using OrderValue = std::optional<double>;
using OrderValues = std::array<OrderValue, kMaxOrder>;

struct EntailmentContext {
  std::set<RecordId> gt_entities;
  std::set<RecordId> desc_entities;
  std::array<NGramMultiset, kMaxOrder> gt_ngrams;
};

EntailmentContext make_context(const TokenizedText& gt, std::span<const EntitySpan> gt_spans,
                               std::span<const EntitySpan> desc_spans);

// Order an entity participates in: min(token length, 4).
int entity_order(const EntitySpan& span);

/// Fraction of the listed entities present in the description entity set.
/// Zero entities give 0.
double entailment_weight(std::span<const EntitySpan> entities,
                         const std::set<RecordId>& desc_entities);

/// Mean reward over predicted entities of the given order. An entity earns 1
/// when the ground truth contains it, otherwise its entailment weight (1 if
/// the description contains it, else 0). nullopt when no entity has this
/// order.
OrderValue entity_precision_order(std::span<const EntitySpan> pred_entities, int order,
                                  const EntailmentContext& ctx);

/// Clipped n-gram precision over n-grams that touch no entity token, on both
/// sides. nullopt when the prediction has no such n-gram.
OrderValue nonentity_precision_order(std::span<const std::string> pred,
                                     std::span<const EntitySpan> pred_spans,
                                     std::span<const std::string> gt,
                                     std::span<const EntitySpan> gt_spans, int order);

/// Frequency-weighted n-gram recall of gt by pred. nullopt when gt is
/// shorter than `order`.
OrderValue recall_order(std::span<const std::string> pred, std::span<const std::string> gt,
                        int order);

/// exp(mean log) over present components, each floored at theta.
/// nullopt when every component is absent.
OrderValue geometric_mean_smoothed(std::span<const OrderValue> components,
                                   double theta = kDefaultTheta);

// 1 - sqrt(n_wrong / n_total); 1 when n_total is 0. Throws ValidationError
// when n_wrong > n_total.
double gamma(std::size_t n_wrong, std::size_t n_total);

/// Blends the two precision terms. If one term is absent the other is used
/// alone; if both are absent the result is 0.
double combine_precision(double gamma_weight, OrderValue nonentity, OrderValue entity,
                         GammaOrientation orientation = GammaOrientation::AsPrinted);

double entailed_recall(std::span<const std::string> pred, std::span<const std::string> gt,
                       double theta = kDefaultTheta);

// Predicted entities found in neither the ground truth nor the description.
std::size_t counterfactual_count(std::span<const EntitySpan> pred_entities,
                                 const EntailmentContext& ctx);

struct MolHalluScore {
  std::string id;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double gamma = 1.0;
  std::size_t n_wrong = 0;
  std::size_t n_total = 0;
  std::size_t n_counterfactual = 0;
  OrderValue entity_precision;     // geometric mean over orders
  OrderValue nonentity_precision;  // geometric mean over orders
  OrderValues per_order_entity_precision{};
  OrderValues per_order_nonentity_precision{};
  OrderValues per_order_recall{};

  nlohmann::ordered_json to_json() const;
};

MolHalluScore score_sample(const ScoringSample& sample, const EntityLexicon& lexicon,
                           const ScoringConfig& config = {});

struct CorpusScore {
  double mean_f1 = 0.0;
  std::vector<MolHalluScore> sample_scores;
  // N_c -> number of samples.
  std::map<std::size_t, std::size_t> histogram;
};

// Throws ValidationError on an empty corpus.
CorpusScore score_corpus(std::span<const ScoringSample> samples, const EntityLexicon& lexicon,
                         const ScoringConfig& config = {});

}  // namespace molhallu
