#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "molhallu/errors.hpp"
#include "molhallu/reports.hpp"

using namespace molhallu;

namespace {

MolHalluScore score(std::string id, double f1, std::size_t nc) {
  MolHalluScore s;
  s.id = std::move(id);
  s.f1 = f1;
  s.n_counterfactual = nc;
  return s;
}

SampleBaselines base(std::string id, double v) {
  SampleBaselines b;
  b.id = std::move(id);
  b.scores = {v, v / 2, v, v / 2, v, v};
  return b;
}

ComparisonTable two_rows(double f1a = 0.4, double f1b = 0.123456) {
  CorpusScore c;
  c.sample_scores = {score("b", f1b, 3), score("a", f1a, 1)};
  std::vector<SampleBaselines> bl{base("a", 0.9), base("b", 0.55555)};
  return comparison_table(c, bl);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("comparison_table") {
  auto t = two_rows();
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].id == "a");
  CHECK(t.rows[0].mol_hallu == doctest::Approx(40.0));
  CHECK(t.rows[0].meteor == doctest::Approx(90.0));
  CHECK(t.rows[1].n_counterfactual == 3.0);
  CHECK(t.mean.mol_hallu == doctest::Approx((40.0 + 12.3456) / 2));
  CHECK(t.mean.bleu2 == doctest::Approx((90.0 + 55.555) / 2));
  CHECK(t.mean.n_counterfactual == doctest::Approx(2.0));

  CorpusScore c;
  c.sample_scores = {score("a", 0.1, 0)};
  std::vector<SampleBaselines> wrong{base("z", 0.1)};
  CHECK_THROWS_AS(comparison_table(c, wrong), ValidationError);
}

TEST_CASE("csv rendering") {
  auto csv = to_csv(two_rows());
  auto lines = split(csv, '\n');
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "id,bleu2,bleu4,rouge1,rouge2,rougeL,meteor,mol_hallu,n_counterfactual");
  CHECK(lines[1] == "a,90.0,45.0,90.0,45.0,90.0,90.0,40.0,1.0");
  CHECK(lines[2] == "b,55.6,27.8,55.6,27.8,55.6,55.6,12.3,3.0");
  CHECK(lines[3].rfind("mean,", 0) == 0);
}

TEST_CASE("csv and json agree after rounding") {
  auto t = two_rows(0.98765, 0.01234);
  auto j = to_json(t);
  auto back = comparison_from_json(nlohmann::json::parse(j.dump()));
  auto lines = split(to_csv(t), '\n');
  REQUIRE(back.rows.size() == 2);
  for (std::size_t r = 0; r < 2; ++r) {
    auto cells = split(lines[r + 1], ',');
    CHECK(cells[0] == back.rows[r].id);
    CHECK(std::stod(cells[7]) == doctest::Approx(back.rows[r].mol_hallu));
    CHECK(std::stod(cells[1]) == doctest::Approx(back.rows[r].bleu2));
  }
  CHECK(to_csv(back) == to_csv(comparison_from_json(nlohmann::json::parse(to_json(back).dump()))));
}

TEST_CASE("histogram_nc") {
  std::vector<std::size_t> nc{0, 0, 2, 5};
  auto h = histogram_nc(nc);
  CHECK(h.counts == std::map<std::size_t, std::size_t>{{0, 2}, {2, 1}, {5, 1}});
  CHECK(h.high_band == 1);
  CHECK(h.low_band == 1);
  CHECK(h.total == 4);
  CHECK(h.low_band + h.high_band <= h.total);
  CHECK(h.mean_nc == doctest::Approx(7.0 / 4.0));

  std::vector<std::size_t> zeros{0, 0, 0};
  auto z = histogram_nc(zeros);
  CHECK(z.counts.size() == 1);
  CHECK(z.counts.at(0) == 3);

  CHECK_THROWS_AS(histogram_nc(std::vector<std::size_t>{}), ValidationError);

  auto text = render_histogram_text(h);
  CHECK(text.find("high band") != std::string::npos);
  auto svg = render_histogram_svg(h);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(h.to_json()["bins"].size() == 3);
}

TEST_CASE("diff_report") {
  auto before = two_rows(0.4, 0.2);
  auto same = diff_report(before, before);
  for (const char* c : kComparisonColumns) CHECK(same["metrics"][c]["delta"].get<double>() == 0.0);
  CHECK(same["histogram_shift"]["direction"] == "unchanged");

  CorpusScore c;
  c.sample_scores = {score("b", 0.5, 1), score("a", 0.9, 0)};
  std::vector<SampleBaselines> bl{base("a", 0.9), base("b", 0.55555)};
  auto after = comparison_table(c, bl);
  auto d = diff_report(before, after);
  CHECK(d["histogram_shift"]["shift"].get<double>() < 0);
  CHECK(d["histogram_shift"]["direction"] == "fewer");

  double sum = 0.0;
  for (const auto& s : d["per_sample"]) sum += s["mol_hallu_delta"].get<double>();
  CHECK(d["metrics"]["mol_hallu"]["delta"].get<double>() == doctest::Approx(sum / 2));

  CorpusScore other;
  other.sample_scores = {score("x", 0.5, 1), score("a", 0.9, 0)};
  std::vector<SampleBaselines> obl{base("a", 0.9), base("x", 0.5)};
  CHECK_THROWS_AS(diff_report(before, comparison_table(other, obl)), ValidationError);
}
