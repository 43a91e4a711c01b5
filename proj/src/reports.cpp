#include "molhallu/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "molhallu/errors.hpp"

namespace molhallu {

namespace {

double ComparisonRow::*const kColumnMembers[] = {
    &ComparisonRow::bleu2,  &ComparisonRow::bleu4,  &ComparisonRow::rouge1,
    &ComparisonRow::rouge2, &ComparisonRow::rougeL, &ComparisonRow::meteor,
    &ComparisonRow::mol_hallu, &ComparisonRow::n_counterfactual};

double round1(double v) {
  const double r = std::round(v * 10.0) / 10.0;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string format1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", round1(v));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json row_json(const ComparisonRow& row) {
  nlohmann::ordered_json j;
  j["id"] = row.id;
  for (std::size_t c = 0; c < kComparisonColumns.size(); ++c) {
    j[kComparisonColumns[c]] = round1(row.*kColumnMembers[c]);
  }
  return j;
}

ComparisonRow row_from_json(const nlohmann::json& j) {
  ComparisonRow row;
  row.id = j.at("id").get<std::string>();
  for (std::size_t c = 0; c < kComparisonColumns.size(); ++c) {
    row.*kColumnMembers[c] = j.at(kComparisonColumns[c]).get<double>();
  }
  return row;
}

void require_same_ids(const ComparisonTable& a, const ComparisonTable& b) {
  auto ids = [](const ComparisonTable& t) {
    std::vector<std::string> out;
    for (const auto& r : t.rows) out.push_back(r.id);
    std::sort(out.begin(), out.end());
    return out;
  };
  if (ids(a) != ids(b)) throw ValidationError("reports cover different sample ids");
}

}  // namespace

ComparisonRow column_means(std::span<const ComparisonRow> rows) {
  ComparisonRow mean;
  mean.id = "mean";
  if (rows.empty()) return mean;
  for (auto member : kColumnMembers) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r.*member;
    mean.*member = sum / static_cast<double>(rows.size());
  }
  return mean;
}

ComparisonTable comparison_table(const CorpusScore& corpus,
                                 std::span<const SampleBaselines> baselines) {
  if (corpus.sample_scores.size() != baselines.size()) {
    throw ValidationError("score sets differ in size");
  }
  std::unordered_map<std::string, const BaselineScores*> by_id;
  for (const auto& b : baselines) {
    if (!by_id.emplace(b.id, &b.scores).second) {
      throw ValidationError("duplicate baseline id '" + b.id + "'");
    }
  }

  ComparisonTable table;
  for (const auto& s : corpus.sample_scores) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) throw ValidationError("no baseline scores for id '" + s.id + "'");
    const BaselineScores& b = *it->second;
    table.rows.push_back({s.id, 100.0 * b.bleu2, 100.0 * b.bleu4, 100.0 * b.rouge1,
                          100.0 * b.rouge2, 100.0 * b.rougeL, 100.0 * b.meteor, 100.0 * s.f1,
                          static_cast<double>(s.n_counterfactual)});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const ComparisonRow& a, const ComparisonRow& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].id == table.rows[i - 1].id) {
      throw ValidationError("duplicate sample id '" + table.rows[i].id + "'");
    }
  }
  table.mean = column_means(table.rows);
  return table;
}

std::string to_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "id";
  for (const char* column : kComparisonColumns) out << ',' << column;
  out << '\n';
  auto write_row = [&](const ComparisonRow& row) {
    out << csv_field(row.id);
    for (auto member : kColumnMembers) out << ',' << format1(row.*member);
    out << '\n';
  };
  for (const auto& row : table.rows) write_row(row);
  write_row(table.mean);
  return out.str();
}

nlohmann::ordered_json to_json(const ComparisonTable& table) {
  nlohmann::ordered_json j;
  j["scale"] = "0-100";
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) rows.push_back(row_json(row));
  j["rows"] = std::move(rows);
  j["mean"] = row_json(table.mean);
  return j;
}

ComparisonTable comparison_from_json(const nlohmann::json& j) {
  ComparisonTable table;
  try {
    for (const auto& row : j.at("rows")) table.rows.push_back(row_from_json(row));
    table.mean = row_from_json(j.at("mean"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed comparison report: ") + e.what());
  }
  return table;
}

nlohmann::ordered_json HistogramSummary::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  auto bins = nlohmann::ordered_json::array();
  for (const auto& [nc, count] : counts) bins.push_back({{"n_counterfactual", nc}, {"count", count}});
  j["bins"] = std::move(bins);
  j["low_band"] = {{"range", "0 < N_c < 3"}, {"count", low_band}};
  j["high_band"] = {{"range", "N_c > 4"}, {"count", high_band}};
  j["mean_n_counterfactual"] = mean_nc;
  return j;
}

HistogramSummary histogram_nc(std::span<const std::size_t> counterfactual_counts) {
  if (counterfactual_counts.empty()) throw ValidationError("histogram of an empty corpus");
  HistogramSummary h;
  double sum = 0.0;
  for (std::size_t nc : counterfactual_counts) {
    ++h.counts[nc];
    ++h.total;
    sum += static_cast<double>(nc);
    if (nc > 0 && nc < 3) ++h.low_band;
    if (nc > 4) ++h.high_band;
  }
  h.mean_nc = sum / static_cast<double>(h.total);
  return h;
}

HistogramSummary histogram_nc(const CorpusScore& corpus) {
  std::vector<std::size_t> counts;
  counts.reserve(corpus.sample_scores.size());
  for (const auto& s : corpus.sample_scores) counts.push_back(s.n_counterfactual);
  return histogram_nc(counts);
}

std::string render_histogram_text(const HistogramSummary& histogram) {
  constexpr std::size_t kWidth = 50;
  std::size_t peak = 0;
  for (const auto& [nc, count] : histogram.counts) peak = std::max(peak, count);
  std::ostringstream out;
  out << "N_c  count\n";
  for (const auto& [nc, count] : histogram.counts) {
    const std::size_t bar = peak == 0 ? 0 : (count * kWidth + peak - 1) / peak;
    char label[32];
    std::snprintf(label, sizeof label, "%3zu  %5zu ", nc, count);
    out << label << std::string(bar, '#') << '\n';
  }
  out << "low band (0 < N_c < 3): " << histogram.low_band << '\n';
  out << "high band (N_c > 4): " << histogram.high_band << '\n';
  return out.str();
}

std::string render_histogram_svg(const HistogramSummary& histogram) {
  constexpr int kBarWidth = 32;
  constexpr int kGap = 8;
  constexpr int kPlotHeight = 200;
  constexpr int kMargin = 40;

  std::size_t max_nc = histogram.counts.empty() ? 0 : histogram.counts.rbegin()->first;
  std::size_t peak = 1;
  for (const auto& [nc, count] : histogram.counts) peak = std::max(peak, count);
  const int bins = static_cast<int>(max_nc) + 1;
  const int width = 2 * kMargin + bins * (kBarWidth + kGap);
  const int height = kPlotHeight + 2 * kMargin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << kMargin << "\" y=\"20\">Counterfactual entities per sample (n="
      << histogram.total << ")</text>\n";
  const int baseline = kMargin + kPlotHeight;
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << baseline << "\" x2=\"" << width - kMargin
      << "\" y2=\"" << baseline << "\" stroke=\"black\"/>\n";
  for (int nc = 0; nc < bins; ++nc) {
    auto it = histogram.counts.find(static_cast<std::size_t>(nc));
    const std::size_t count = it == histogram.counts.end() ? 0 : it->second;
    const int bar = static_cast<int>(count * kPlotHeight / peak);
    const int x = kMargin + nc * (kBarWidth + kGap);
    const char* fill = nc > 4 ? "#c0392b" : (nc > 0 && nc < 3 ? "#2e86c1" : "#7f8c8d");
    svg << "<rect x=\"" << x << "\" y=\"" << baseline - bar << "\" width=\"" << kBarWidth
        << "\" height=\"" << bar << "\" fill=\"" << fill << "\"/>\n";
    svg << "<text x=\"" << x + kBarWidth / 2 << "\" y=\"" << baseline + 14
        << "\" text-anchor=\"middle\">" << nc << "</text>\n";
    if (count > 0) {
      svg << "<text x=\"" << x + kBarWidth / 2 << "\" y=\"" << baseline - bar - 4
          << "\" text-anchor=\"middle\">" << count << "</text>\n";
    }
  }
  svg << "<text x=\"" << kMargin << "\" y=\"" << height - 8 << "\">N_c</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

nlohmann::ordered_json diff_report(const ComparisonTable& before, const ComparisonTable& after) {
  require_same_ids(before, after);
  const ComparisonRow mean_before = column_means(before.rows);
  const ComparisonRow mean_after = column_means(after.rows);

  nlohmann::ordered_json j;
  nlohmann::ordered_json metrics;
  for (std::size_t c = 0; c < kComparisonColumns.size(); ++c) {
    const double b = mean_before.*kColumnMembers[c];
    const double a = mean_after.*kColumnMembers[c];
    metrics[kComparisonColumns[c]] = {{"before", b}, {"after", a}, {"delta", a - b}};
  }
  j["metrics"] = std::move(metrics);

  std::unordered_map<std::string, const ComparisonRow*> after_by_id;
  for (const auto& r : after.rows) after_by_id[r.id] = &r;
  auto per_sample = nlohmann::ordered_json::array();
  for (const auto& r : before.rows) {
    const ComparisonRow& a = *after_by_id.at(r.id);
    per_sample.push_back({{"id", r.id},
                          {"mol_hallu_delta", a.mol_hallu - r.mol_hallu},
                          {"n_counterfactual_delta", a.n_counterfactual - r.n_counterfactual}});
  }
  j["per_sample"] = std::move(per_sample);

  const double shift = mean_after.n_counterfactual - mean_before.n_counterfactual;
  j["histogram_shift"] = {{"mean_n_counterfactual_before", mean_before.n_counterfactual},
                          {"mean_n_counterfactual_after", mean_after.n_counterfactual},
                          {"shift", shift},
                          {"direction", shift < 0 ? "fewer" : (shift > 0 ? "more" : "unchanged")}};
  return j;
}

}  // namespace molhallu
