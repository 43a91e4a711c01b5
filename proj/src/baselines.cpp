#include "molhallu/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "molhallu/errors.hpp"
#include "molhallu/textproc.hpp"

namespace molhallu {

namespace {

std::size_t clipped_overlap(const NGramMultiset& counted, const NGramMultiset& clip) {
  std::size_t matched = 0;
  for (const auto& [key, count] : counted.counts) {
    auto it = clip.counts.find(key);
    if (it != clip.counts.end()) matched += std::min(count, it->second);
  }
  return matched;
}

}  // namespace

double bleu(std::span<const std::string> pred, std::span<const std::string> ref, int max_order,
            std::span<const double> weights, double theta) {
  if (max_order < 1 || max_order > kMaxOrder) {
    throw ValidationError("BLEU max order must be in 1..4");
  }
  if (ref.empty()) throw ValidationError("BLEU: empty reference");
  if (!weights.empty() && weights.size() != static_cast<std::size_t>(max_order)) {
    throw ValidationError("BLEU: expected one weight per order");
  }
  if (pred.empty()) return 0.0;

  double log_sum = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    const auto candidate = extract_ngrams(pred, n);
    const auto reference = extract_ngrams(ref, n);
    const std::size_t total = candidate.total();
    double p = total == 0 ? 0.0
                          : static_cast<double>(clipped_overlap(candidate, reference)) /
                                static_cast<double>(total);
    if (p <= 0.0) p = theta;
    const double w = weights.empty() ? 1.0 / max_order : weights[n - 1];
    log_sum += w * std::log(p);
  }

  const auto c = static_cast<double>(pred.size());
  const auto r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

double rouge_n(std::span<const std::string> pred, std::span<const std::string> ref, int n) {
  const auto reference = extract_ngrams(ref, n);
  const std::size_t total = reference.total();
  if (total == 0) return 0.0;
  return static_cast<double>(clipped_overlap(reference, extract_ngrams(pred, n))) /
         static_cast<double>(total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

double rouge_l(std::span<const std::string> pred, std::span<const std::string> ref, double beta) {
  if (pred.empty() || ref.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(pred, ref));
  if (lcs == 0.0) return 0.0;
  const double recall = lcs / static_cast<double>(ref.size());
  const double precision = lcs / static_cast<double>(pred.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * recall * precision / (recall + b2 * precision);
}

MeteorAlignment meteor_align(std::span<const std::string> pred, std::span<const std::string> ref) {
  const std::size_t np = pred.size();
  const std::size_t nr = ref.size();
  std::vector<bool> used_pred(np, false);
  std::vector<bool> used_ref(nr, false);
  // run[i][j]: length of the unaligned common run starting at pred[i], ref[j].
  std::vector<std::vector<std::size_t>> run(np + 1, std::vector<std::size_t>(nr + 1, 0));

  MeteorAlignment alignment;
  while (true) {
    std::size_t best_len = 0, best_i = 0, best_j = 0;
    for (std::size_t i = np; i-- > 0;) {
      for (std::size_t j = nr; j-- > 0;) {
        run[i][j] = (!used_pred[i] && !used_ref[j] && pred[i] == ref[j]) ? run[i + 1][j + 1] + 1 : 0;
      }
    }
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < nr; ++j) {
        if (run[i][j] > best_len) {
          best_len = run[i][j];
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_len == 0) break;
    for (std::size_t k = 0; k < best_len; ++k) {
      used_pred[best_i + k] = true;
      used_ref[best_j + k] = true;
    }
    alignment.matches += best_len;
    ++alignment.chunks;
  }
  return alignment;
}

double meteor(std::span<const std::string> pred, std::span<const std::string> ref,
              const MeteorParams& params) {
  const MeteorAlignment alignment = meteor_align(pred, ref);
  if (alignment.matches == 0) return 0.0;
  const auto m = static_cast<double>(alignment.matches);
  const double precision = m / static_cast<double>(pred.size());
  const double recall = m / static_cast<double>(ref.size());
  const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
  const double penalty =
      params.gamma * std::pow(static_cast<double>(alignment.chunks) / m, params.penalty_exponent);
  return (1.0 - penalty) * fmean;
}

nlohmann::ordered_json BaselineScores::to_json() const {
  nlohmann::ordered_json j;
  j["bleu2"] = bleu2;
  j["bleu4"] = bleu4;
  j["rouge1"] = rouge1;
  j["rouge2"] = rouge2;
  j["rougeL"] = rougeL;
  j["meteor"] = meteor;
  return j;
}

BaselineScores baseline_scores(std::span<const std::string> pred, std::span<const std::string> ref,
                               const MeteorParams& meteor_params) {
  BaselineScores s;
  s.bleu2 = bleu(pred, ref, 2);
  s.bleu4 = bleu(pred, ref, 4);
  s.rouge1 = rouge_n(pred, ref, 1);
  s.rouge2 = rouge_n(pred, ref, 2);
  s.rougeL = rouge_l(pred, ref);
  s.meteor = meteor(pred, ref, meteor_params);
  return s;
}

}  // namespace molhallu
