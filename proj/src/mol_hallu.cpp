#include "molhallu/mol_hallu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "molhallu/errors.hpp"

namespace molhallu {

namespace {

void check_order(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw ValidationError("n-gram order must be in 1..4, got " + std::to_string(order));
  }
}

std::vector<bool> entity_mask(std::size_t length, std::span<const EntitySpan> spans) {
  std::vector<bool> mask(length, false);
  for (const auto& span : spans) {
    for (std::size_t i = span.start; i < span.end() && i < length; ++i) mask[i] = true;
  }
  return mask;
}

NGramMultiset nonentity_ngrams(std::span<const std::string> tokens,
                               std::span<const EntitySpan> spans, int order) {
  const auto mask = entity_mask(tokens.size(), spans);
  NGramMultiset out;
  out.order = order;
  const auto n = static_cast<std::size_t>(order);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    if (std::any_of(mask.begin() + static_cast<std::ptrdiff_t>(i),
                    mask.begin() + static_cast<std::ptrdiff_t>(i + n), [](bool b) { return b; })) {
      continue;
    }
    ++out.counts[ngram_key(tokens.subspan(i, n))];
  }
  return out;
}

// Sum over `numerator` keys of min(count, other count).
std::size_t clipped_matches(const NGramMultiset& numerator, const NGramMultiset& other) {
  std::size_t matched = 0;
  for (const auto& [key, count] : numerator.counts) {
    auto it = other.counts.find(key);
    if (it != other.counts.end()) matched += std::min(count, it->second);
  }
  return matched;
}

nlohmann::ordered_json order_values_json(const OrderValues& values) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& v : values) {
    if (v) {
      j.push_back(*v);
    } else {
      j.push_back(nullptr);
    }
  }
  return j;
}

nlohmann::ordered_json optional_json(const OrderValue& value) {
  return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string_view to_string(GammaOrientation orientation) {
  return orientation == GammaOrientation::AsPrinted ? "as-printed" : "inverted";
}

std::optional<GammaOrientation> parse_gamma_orientation(std::string_view name) {
  if (name == "as-printed") return GammaOrientation::AsPrinted;
  if (name == "inverted") return GammaOrientation::Inverted;
  return std::nullopt;
}

void ScoringConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ValidationError("theta must satisfy 0 < theta < 1, got " + std::to_string(theta));
  }
}

EntailmentContext make_context(const TokenizedText& gt, std::span<const EntitySpan> gt_spans,
                               std::span<const EntitySpan> desc_spans) {
  EntailmentContext ctx;
  for (const auto& span : gt_spans) ctx.gt_entities.insert(span.record_id);
  for (const auto& span : desc_spans) ctx.desc_entities.insert(span.record_id);
  for (int n = 1; n <= kMaxOrder; ++n) ctx.gt_ngrams[n - 1] = extract_ngrams(gt.tokens, n);
  return ctx;
}

int entity_order(const EntitySpan& span) {
  return static_cast<int>(std::min<std::size_t>(span.length, kMaxOrder));
}

double entailment_weight(std::span<const EntitySpan> entities,
                         const std::set<RecordId>& desc_entities) {
  if (entities.empty()) return 0.0;
  std::size_t present = 0;
  for (const auto& e : entities) present += desc_entities.count(e.record_id);
  return static_cast<double>(present) / static_cast<double>(entities.size());
}

OrderValue entity_precision_order(std::span<const EntitySpan> pred_entities, int order,
                                  const EntailmentContext& ctx) {
  check_order(order);
  double reward = 0.0;
  std::size_t count = 0;
  for (const auto& e : pred_entities) {
    if (entity_order(e) != order) continue;
    ++count;
    if (ctx.gt_entities.count(e.record_id)) {
      reward += 1.0;
    } else {
      reward += entailment_weight(std::span(&e, 1), ctx.desc_entities);
    }
  }
  if (count == 0) return std::nullopt;
  return reward / static_cast<double>(count);
}

OrderValue nonentity_precision_order(std::span<const std::string> pred,
                                     std::span<const EntitySpan> pred_spans,
                                     std::span<const std::string> gt,
                                     std::span<const EntitySpan> gt_spans, int order) {
  check_order(order);
  const auto candidate = nonentity_ngrams(pred, pred_spans, order);
  const std::size_t total = candidate.total();
  if (total == 0) return std::nullopt;
  const auto reference = nonentity_ngrams(gt, gt_spans, order);
  return static_cast<double>(clipped_matches(candidate, reference)) / static_cast<double>(total);
}

OrderValue recall_order(std::span<const std::string> pred, std::span<const std::string> gt,
                        int order) {
  const auto reference = extract_ngrams(gt, order);
  const std::size_t total = reference.total();
  if (total == 0) return std::nullopt;
  const auto candidate = extract_ngrams(pred, order);
  return static_cast<double>(clipped_matches(reference, candidate)) / static_cast<double>(total);
}

OrderValue geometric_mean_smoothed(std::span<const OrderValue> components, double theta) {
  double log_sum = 0.0;
  std::size_t present = 0;
  for (const auto& c : components) {
    if (!c) continue;
    log_sum += std::log(std::max(*c, theta));
    ++present;
  }
  if (present == 0) return std::nullopt;
  return std::exp(log_sum / static_cast<double>(present));
}

double gamma(std::size_t n_wrong, std::size_t n_total) {
  if (n_wrong > n_total) {
    throw ValidationError("gamma: n_wrong (" + std::to_string(n_wrong) + ") exceeds n_total (" +
                          std::to_string(n_total) + ")");
  }
  if (n_total == 0) return 1.0;
  return 1.0 - std::sqrt(static_cast<double>(n_wrong) / static_cast<double>(n_total));
}

double combine_precision(double gamma_weight, OrderValue nonentity, OrderValue entity,
                         GammaOrientation orientation) {
  if (!nonentity && !entity) return 0.0;
  if (!entity) return *nonentity;
  if (!nonentity) return *entity;
  const double w = orientation == GammaOrientation::AsPrinted ? gamma_weight : 1.0 - gamma_weight;
  return w * *nonentity + (1.0 - w) * *entity;
}

double entailed_recall(std::span<const std::string> pred, std::span<const std::string> gt,
                       double theta) {
  OrderValues components;
  for (int n = 1; n <= kMaxOrder; ++n) components[n - 1] = recall_order(pred, gt, n);
  return geometric_mean_smoothed(components, theta).value_or(0.0);
}

std::size_t counterfactual_count(std::span<const EntitySpan> pred_entities,
                                 const EntailmentContext& ctx) {
  return static_cast<std::size_t>(
      std::count_if(pred_entities.begin(), pred_entities.end(), [&](const EntitySpan& e) {
        return !ctx.gt_entities.count(e.record_id) && !ctx.desc_entities.count(e.record_id);
      }));
}

nlohmann::ordered_json MolHalluScore::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["gamma"] = gamma;
  j["n_wrong"] = n_wrong;
  j["n_total"] = n_total;
  j["n_counterfactual"] = n_counterfactual;
  j["entity_precision"] = optional_json(entity_precision);
  j["nonentity_precision"] = optional_json(nonentity_precision);
  j["per_order_entity_precision"] = order_values_json(per_order_entity_precision);
  j["per_order_nonentity_precision"] = order_values_json(per_order_nonentity_precision);
  j["per_order_recall"] = order_values_json(per_order_recall);
  return j;
}

MolHalluScore score_sample(const ScoringSample& sample, const EntityLexicon& lexicon,
                           const ScoringConfig& config) {
  config.validate();

  const TokenizedText pred = tokenize(sample.answer_pred);
  const TokenizedText gt = tokenize(sample.answer_gt);
  const TokenizedText desc = tokenize(sample.description);
  const auto pred_spans = extract_entities(pred.tokens, lexicon);
  const auto gt_spans = extract_entities(gt.tokens, lexicon);
  const auto desc_spans = extract_entities(desc.tokens, lexicon);
  const EntailmentContext ctx = make_context(gt, gt_spans, desc_spans);

  MolHalluScore score;
  score.id = sample.id;
  for (int n = 1; n <= kMaxOrder; ++n) {
    score.per_order_entity_precision[n - 1] = entity_precision_order(pred_spans, n, ctx);
    score.per_order_nonentity_precision[n - 1] =
        nonentity_precision_order(pred.tokens, pred_spans, gt.tokens, gt_spans, n);
    score.per_order_recall[n - 1] = recall_order(pred.tokens, gt.tokens, n);
  }
  score.entity_precision = geometric_mean_smoothed(score.per_order_entity_precision, config.theta);
  score.nonentity_precision =
      geometric_mean_smoothed(score.per_order_nonentity_precision, config.theta);

  score.n_counterfactual = counterfactual_count(pred_spans, ctx);
  score.n_wrong = score.n_counterfactual;
  score.n_total = pred_spans.size();
  score.gamma = gamma(score.n_wrong, score.n_total);

  score.precision = combine_precision(score.gamma, score.nonentity_precision,
                                      score.entity_precision, config.orientation);
  score.recall = geometric_mean_smoothed(score.per_order_recall, config.theta).value_or(0.0);
  const double denom = score.precision + score.recall;
  score.f1 = denom > 0.0 ? 2.0 * score.precision * score.recall / denom : 0.0;
  return score;
}

CorpusScore score_corpus(std::span<const ScoringSample> samples, const EntityLexicon& lexicon,
                         const ScoringConfig& config) {
  if (samples.empty()) throw ValidationError("score_corpus: empty corpus");
  CorpusScore corpus;
  corpus.sample_scores.reserve(samples.size());
  double sum = 0.0;
  for (const auto& sample : samples) {
    corpus.sample_scores.push_back(score_sample(sample, lexicon, config));
    const auto& s = corpus.sample_scores.back();
    sum += s.f1;
    ++corpus.histogram[s.n_counterfactual];
  }
  corpus.mean_f1 = sum / static_cast<double>(samples.size());
  return corpus;
}

}  // namespace molhallu
