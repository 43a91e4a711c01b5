#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "molhallu/baselines.hpp"
#include "molhallu/errors.hpp"
#include "molhallu/random.hpp"
#include "oracles.hpp"

using namespace molhallu;
using V = std::vector<std::string>;

TEST_CASE("bleu") {
  V ref{"the", "cat", "sat", "on", "the", "mat"};
  CHECK(bleu(ref, ref, 4) == doctest::Approx(1.0));
  V shorter{"the", "cat", "sat"};
  const double bp = std::exp(1.0 - 6.0 / 3.0);
  CHECK(bleu(shorter, ref, 1) == doctest::Approx(bp));
  CHECK(bleu(shorter, ref, 1) < 1.0);
  CHECK(bleu(V{"a", "b", "a"}, V{"a", "b"}, 2) == doctest::Approx(std::sqrt(2.0 / 3.0 * 0.5)));
  CHECK(bleu(V{"a", "b", "a"}, V{"a", "b"}, 2) == doctest::Approx(0.5774).epsilon(1e-4));
  CHECK(bleu(V{}, ref, 2) == 0.0);
  CHECK_THROWS_AS(bleu(ref, V{}, 2), ValidationError);
  CHECK_THROWS_AS(bleu(ref, ref, 5), ValidationError);
  const std::vector<double> w{1.0, 0.0};
  CHECK(bleu(V{"a", "b", "a"}, V{"a", "b"}, 2, w) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rouge_n") {
  V t{"a", "b", "c"};
  CHECK(rouge_n(t, t, 1) == 1.0);
  CHECK(rouge_n(V{"x"}, t, 1) == 0.0);
  CHECK(rouge_n(V{"a", "b"}, V{"a", "a", "b"}, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(rouge_n(t, V{"a"}, 2) == 0.0);
  // Recall orientation: swapping arguments changes the value when counts differ.
  CHECK(rouge_n(V{"a", "a", "b"}, V{"a", "b"}, 1) != rouge_n(V{"a", "b"}, V{"a", "a", "b"}, 1));
}

TEST_CASE("rouge_l") {
  V t{"a", "b", "c"};
  CHECK(rouge_l(t, t) == doctest::Approx(1.0));
  CHECK(rouge_l(V{"x", "y"}, t) == 0.0);
  CHECK(lcs_length(V{"a", "c", "d"}, V{"a", "b", "c", "d"}) == 3);
  const double r = 0.75, p = 1.0, b2 = 1.44;
  CHECK(rouge_l(V{"a", "c", "d"}, V{"a", "b", "c", "d"}) == doctest::Approx((1 + b2) * r * p / (r + b2 * p)));
  CHECK(rouge_l(V{}, t) == 0.0);
}

TEST_CASE("meteor") {
  CHECK(meteor(V{"a"}, V{"a"}) == doctest::Approx(0.5));
  V t{"a", "b", "c", "d"};
  CHECK(meteor(t, t) == doctest::Approx(1.0 - 0.5 / 64.0));
  CHECK(meteor(V{"x"}, t) == 0.0);
  MeteorParams no_penalty{0.0, 3.0};
  CHECK(meteor(V{"a", "b", "x", "y"}, V{"a", "b", "z", "w"}, no_penalty) == doctest::Approx(0.5));
  auto a = meteor_align(V{"c", "d", "a", "b"}, t);
  CHECK(a.matches == 4);
  CHECK(a.chunks == 2);
}

TEST_CASE("baselines match reference implementations") {
  Rng rng(31337);
  auto random_text = [&](std::size_t min_len) {
    V t;
    const auto len = rng.uniform_between(min_len, 15);
    for (std::size_t i = 0; i < len; ++i) t.push_back(std::string(1, char('a' + rng.uniform(4))));
    return t;
  };
  for (int trial = 0; trial < 300; ++trial) {
    const V pred = random_text(0);
    const V ref = random_text(1);
    CHECK(std::abs(bleu(pred, ref, 2) - oracle::bleu(pred, ref, 2)) <= 1e-9);
    CHECK(std::abs(bleu(pred, ref, 4) - oracle::bleu(pred, ref, 4)) <= 1e-9);
    CHECK(std::abs(rouge_n(pred, ref, 1) - oracle::rouge_n(pred, ref, 1)) <= 1e-9);
    CHECK(std::abs(rouge_n(pred, ref, 2) - oracle::rouge_n(pred, ref, 2)) <= 1e-9);
    CHECK(lcs_length(pred, ref) == oracle::lcs(pred, ref));
    CHECK(std::abs(rouge_l(pred, ref) - oracle::rouge_l(pred, ref)) <= 1e-9);
    auto al = meteor_align(pred, ref);
    auto want = oracle::meteor_align(pred, ref);
    CHECK(al.matches == oracle::max_unigram_matches(pred, ref));
    CHECK(al.matches == want.matches);
    CHECK(al.chunks == want.chunks);
    CHECK(std::abs(meteor(pred, ref) - oracle::meteor(pred, ref)) <= 1e-9);
  }
}

TEST_CASE("baseline_scores bundle") {
  V t{"a", "b", "c", "d"};
  auto s = baseline_scores(t, t);
  CHECK(s.bleu2 == doctest::Approx(1.0));
  CHECK(s.bleu4 == doctest::Approx(1.0));
  CHECK(s.rouge1 == 1.0);
  CHECK(s.rouge2 == 1.0);
  CHECK(s.rougeL == doctest::Approx(1.0));
  CHECK(s.to_json().contains("meteor"));
}
