#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "molhallu/baselines.hpp"
#include "molhallu/mol_hallu.hpp"

namespace molhallu {

// All metric columns on the 0-100 display scale. Values are kept unrounded;
// rendering rounds to one decimal.
struct ComparisonRow {
  std::string id;
  double bleu2 = 0.0;
  double bleu4 = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double meteor = 0.0;
  double mol_hallu = 0.0;
  double n_counterfactual = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // sorted by id
  ComparisonRow mean;               // id "mean"
};

struct SampleBaselines {
  std::string id;
  BaselineScores scores;
};

inline constexpr std::array<const char*, 8> kComparisonColumns = {
    "bleu2", "bleu4", "rouge1", "rouge2", "rougeL", "meteor", "mol_hallu", "n_counterfactual"};

// Throws ValidationError unless both inputs cover the same ids.
ComparisonTable comparison_table(const CorpusScore& corpus, std::span<const SampleBaselines> baselines);

// Rebuilds the mean row from the rows.
ComparisonRow column_means(std::span<const ComparisonRow> rows);

std::string to_csv(const ComparisonTable& table);
nlohmann::ordered_json to_json(const ComparisonTable& table);
// Reads the JSON rendering back (values as rendered).
ComparisonTable comparison_from_json(const nlohmann::json& j);

struct HistogramSummary {
  std::map<std::size_t, std::size_t> counts;  // N_c -> samples
  std::size_t total = 0;
  std::size_t low_band = 0;   // 0 < N_c < 3
  std::size_t high_band = 0;  // N_c > 4
  double mean_nc = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Throws ValidationError on empty input.
HistogramSummary histogram_nc(std::span<const std::size_t> counterfactual_counts);
HistogramSummary histogram_nc(const CorpusScore& corpus);

std::string render_histogram_text(const HistogramSummary& histogram);
std::string render_histogram_svg(const HistogramSummary& histogram);

/// Per-metric mean deltas (after - before), per-sample Mol-Hallu deltas and
/// the shift in mean N_c. Throws ValidationError when the id sets differ.
nlohmann::ordered_json diff_report(const ComparisonTable& before, const ComparisonTable& after);

}  // namespace molhallu
