#include <doctest.h>

#include <algorithm>
#include <set>

#include "absa/eval.hpp"
#include "absa/synthetic.hpp"
#include "test_util.hpp"

using namespace absa;

namespace {

SpanKey key(int sentence, int begin, int end) {
  return SpanKey{sentence, begin, end};
}

}  // namespace

TEST_SUITE("eval-harness") {

TEST_CASE("dedupe collapses identical span/polarity pairs") {
  std::vector<LabeledSpanKey> items{
      {key(0, 4, 9), Polarity::positive},
      {key(0, 4, 9), Polarity::positive},
  };
  CHECK(dedupe(items).size() == 1);
}

TEST_CASE("dedupe keeps identical spans with different polarity") {
  std::vector<LabeledSpanKey> items{
      {key(0, 4, 9), Polarity::positive},
      {key(0, 4, 9), Polarity::negative},
  };
  CHECK(dedupe(items).size() == 2);
}

TEST_CASE("dedupe of nothing is nothing") { CHECK(dedupe({}).empty()); }

TEST_CASE("perfect extraction scores ones across the board") {
  std::vector<SpanKey> spans{key(0, 0, 4), key(1, 2, 9)};
  SpanMetrics m = span_metrics(spans, spans);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
}

TEST_CASE("no predictions scores zero by convention") {
  std::vector<SpanKey> gold{key(0, 0, 4)};
  SpanMetrics m = span_metrics(gold, {});
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
}

TEST_CASE("one of two predictions against two gold spans halves everything") {
  std::vector<SpanKey> gold{key(0, 0, 4), key(0, 6, 10)};
  std::vector<SpanKey> predicted{key(0, 0, 4), key(0, 11, 14)};
  SpanMetrics m = span_metrics(gold, predicted);
  CHECK(m.true_positives == 1);
  CHECK(m.false_positives == 1);
  CHECK(m.false_negatives == 1);
  CHECK(m.precision == doctest::Approx(0.5));
  CHECK(m.recall == doctest::Approx(0.5));
  CHECK(m.f1 == doctest::Approx(0.5));  // harmonic mean of equal halves
}

TEST_CASE("span metrics match a brute-force intersection oracle") {
  nn::Rng rng(512);
  for (int trial = 0; trial < 1000; ++trial) {
    auto random_set = [&] {
      std::vector<SpanKey> spans;
      const std::size_t n = rng.index(8);
      for (std::size_t i = 0; i < n; ++i) {
        const int s = static_cast<int>(rng.index(3));
        const int b = static_cast<int>(rng.index(6));
        spans.push_back(key(s, b, b + 1 + static_cast<int>(rng.index(4))));
      }
      return spans;
    };
    const std::vector<SpanKey> gold = random_set();
    const std::vector<SpanKey> predicted = random_set();
    const SpanMetrics m = span_metrics(gold, predicted);

    const std::set<SpanKey> gs(gold.begin(), gold.end());
    const std::set<SpanKey> ps(predicted.begin(), predicted.end());
    std::int64_t tp = 0;
    for (const SpanKey& g : gs) {
      tp += std::count(ps.begin(), ps.end(), g);
    }
    CHECK(m.true_positives == tp);
    CHECK(m.false_positives == static_cast<std::int64_t>(ps.size()) - tp);
    CHECK(m.false_negatives == static_cast<std::int64_t>(gs.size()) - tp);

    // F1 is symmetric in gold and predicted
    const SpanMetrics swapped = span_metrics(predicted, gold);
    CHECK(m.f1 == doctest::Approx(swapped.f1).epsilon(1e-12));
  }
}

TEST_CASE("polarity accuracy over gold spans") {
  std::vector<LabeledSpanKey> gold{
      {key(0, 0, 4), Polarity::positive},
      {key(0, 6, 10), Polarity::negative},
      {key(1, 0, 3), Polarity::positive},
      {key(1, 5, 9), Polarity::positive},
  };
  SUBCASE("all correct") {
    std::vector<PredictedPolarity> preds{
        {key(0, 0, 4), Polarity::positive},
        {key(0, 6, 10), Polarity::negative},
        {key(1, 0, 3), Polarity::positive},
        {key(1, 5, 9), Polarity::positive},
    };
    auto r = polarity_accuracy(gold, preds, PolarityEvalMode::gold_spans);
    CHECK(r.value == 1.0);
  }
  SUBCASE("three of four correct") {
    std::vector<PredictedPolarity> preds{
        {key(0, 0, 4), Polarity::positive},
        {key(0, 6, 10), Polarity::positive},  // wrong
        {key(1, 0, 3), Polarity::positive},
        {key(1, 5, 9), Polarity::positive},
    };
    auto r = polarity_accuracy(gold, preds, PolarityEvalMode::gold_spans);
    CHECK(r.value == doctest::Approx(0.75));
  }
  SUBCASE("a missing prediction is a coverage error naming the span") {
    std::vector<PredictedPolarity> preds{
        {key(0, 0, 4), Polarity::positive},
    };
    try {
      polarity_accuracy(gold, preds, PolarityEvalMode::gold_spans);
      FAIL("expected EvalError");
    } catch (const EvalError& e) {
      CHECK(std::string(e.what()).find("sentence 0") != std::string::npos);
      CHECK(std::string(e.what()).find("[6, 10)") != std::string::npos);
    }
  }
}

TEST_CASE("pipeline mode with no true positives reports absence") {
  std::vector<LabeledSpanKey> gold{{key(0, 0, 4), Polarity::positive}};
  auto r = polarity_accuracy(gold, {},
                             PolarityEvalMode::pipeline_true_positives);
  CHECK_FALSE(r.value.has_value());
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("pipeline mode scores only the covered subset") {
  std::vector<LabeledSpanKey> gold{
      {key(0, 0, 4), Polarity::positive},
      {key(0, 6, 10), Polarity::negative},
  };
  std::vector<PredictedPolarity> preds{{key(0, 0, 4), Polarity::positive}};
  auto r = polarity_accuracy(gold, preds,
                             PolarityEvalMode::pipeline_true_positives);
  CHECK(r.value == 1.0);
  CHECK(r.total == 1);
}

TEST_CASE("predictions for unknown spans are rejected") {
  std::vector<LabeledSpanKey> gold{{key(0, 0, 4), Polarity::positive}};
  std::vector<PredictedPolarity> preds{{key(9, 9, 12), Polarity::positive}};
  CHECK_THROWS_AS(
      polarity_accuracy(gold, preds, PolarityEvalMode::gold_spans),
      EvalError);
}

TEST_CASE("fold assignment partitions the corpus evenly") {
  for (int n : {10, 23, 100}) {
    for (int k : {2, 5, 7}) {
      const std::vector<int> folds = fold_assignment(n, k, 42);
      REQUIRE(folds.size() == static_cast<std::size_t>(n));
      std::vector<int> sizes(static_cast<std::size_t>(k), 0);
      for (int f : folds) {
        REQUIRE(f >= 0);
        REQUIRE(f < k);
        ++sizes[static_cast<std::size_t>(f)];
      }
      int total = 0;
      for (int s : sizes) {
        total += s;
        CHECK(std::abs(s - n / k) <= 1);
      }
      CHECK(total == n);  // every sentence in exactly one fold
    }
  }
}

TEST_CASE("leave-one-out assignment gives every sentence its own fold") {
  const std::vector<int> folds = fold_assignment(6, 6, 3);
  std::set<int> distinct(folds.begin(), folds.end());
  CHECK(distinct.size() == 6);
}

TEST_CASE("fold assignment is deterministic and validates its inputs") {
  CHECK(fold_assignment(20, 5, 9) == fold_assignment(20, 5, 9));
  CHECK(fold_assignment(20, 5, 9) != fold_assignment(20, 5, 10));
  CHECK_THROWS_AS(fold_assignment(3, 5, 1), ConfigError);
  CHECK_THROWS_AS(fold_assignment(10, 1, 1), ConfigError);
}

TEST_CASE("cross-validation on the synthetic corpus separates cleanly") {
  synth::Dataset data = synth::generate({.sentences = 100, .seed = 7,
                                         .embedding_dim = 24});
  auto resources =
      std::make_shared<const FeatureResources>(std::move(data.resources));
  CvConfig config;
  config.k = 5;
  config.seed = 11;
  config.tagger_epochs = 12;
  config.classifier_epochs = 8;
  CvResult result = cross_validate(data.records, resources, config);
  REQUIRE(result.folds.size() == 5);
  CAPTURE(result.mean_f1);
  CHECK(result.mean_f1 >= 0.9);
  REQUIRE(result.mean_polarity_isolated.has_value());
  CHECK(*result.mean_polarity_isolated >= 0.9);

  // reruns reproduce the numbers exactly
  CvResult again = cross_validate(data.records, resources, config);
  CHECK(again.mean_f1 == result.mean_f1);
  CHECK(cv_report_json(again) == cv_report_json(result));
}

}  // TEST_SUITE
