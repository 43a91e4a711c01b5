#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "json.hpp"

namespace molhallu {

// Sentence-level BLEU with clipped n-gram precisions and brevity penalty.
// Zero precisions are floored at theta before the log. `weights` defaults to
// uniform 1/max_order; an empty candidate scores 0. Throws ValidationError on
// an empty reference or max_order outside 1..4.
double bleu(std::span<const std::string> pred, std::span<const std::string> ref, int max_order,
            std::span<const double> weights = {}, double theta = 1e-5);

// Recall-oriented ROUGE-N; 0 when the reference has no n-grams.
double rouge_n(std::span<const std::string> pred, std::span<const std::string> ref, int n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// LCS F-measure: (1 + beta^2) R P / (R + beta^2 P).
double rouge_l(std::span<const std::string> pred, std::span<const std::string> ref,
               double beta = 1.2);

struct MeteorParams {
  double gamma = 0.5;
  double penalty_exponent = 3.0;
};

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

/// Exact-match unigram alignment. Runs of identical tokens are aligned
/// longest-first (ties: leftmost in pred, then leftmost in ref) until no
/// unaligned pair of equal tokens remains, which always yields the maximum
/// number of matches. `chunks` counts maximal runs that are contiguous in
/// both sequences.
MeteorAlignment meteor_align(std::span<const std::string> pred, std::span<const std::string> ref);

// (1 - gamma * (chunks / matches)^exponent) * 10PR / (R + 9P); 0 without
// matches.
double meteor(std::span<const std::string> pred, std::span<const std::string> ref,
              const MeteorParams& params = {});

struct BaselineScores {
  double bleu2 = 0.0;
  double bleu4 = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double meteor = 0.0;

  nlohmann::ordered_json to_json() const;
};

BaselineScores baseline_scores(std::span<const std::string> pred, std::span<const std::string> ref,
                               const MeteorParams& meteor_params = {});

}  // namespace molhallu
