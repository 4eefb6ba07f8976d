#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absa/models.hpp"

namespace absa {

/// Identity of an aspect occurrence for exact matching: the sentence it
/// lives in plus its character offsets.
struct SpanKey {
  int sentence = 0;
  int begin = 0;
  int end = 0;
  auto operator<=>(const SpanKey&) const = default;
};

struct LabeledSpanKey {
  SpanKey span;
  Polarity polarity = Polarity::positive;
  auto operator<=>(const LabeledSpanKey&) const = default;
};

/// Collapses annotations that share offsets and polarity, keeping the first
/// occurrence order. Same offsets with different polarity stay separate.
std::vector<LabeledSpanKey> dedupe(const std::vector<LabeledSpanKey>& items);

struct SpanMetrics {
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;
  double precision = 0.0;  // 0 when nothing was predicted
  double recall = 0.0;     // 0 when there is no gold
  double f1 = 0.0;         // 0 when precision + recall == 0
};

/// Exact-match comparison of two span sets. Duplicate keys on either side
/// count once.
SpanMetrics span_metrics(std::span<const SpanKey> gold,
                         std::span<const SpanKey> predicted);

enum class PolarityEvalMode {
  gold_spans,               // predictions must cover every unique gold span
  pipeline_true_positives,  // predictions cover the correctly extracted spans
};

struct PredictedPolarity {
  SpanKey span;
  Polarity polarity = Polarity::positive;
};

struct PolarityAccuracyResult {
  std::optional<double> value;  // absent when nothing was evaluable
  int total = 0;
  int correct = 0;
  std::string reason;  // set when value is absent
};

/// Fraction of gold labels reproduced on the evaluation span set. In
/// gold_spans mode that set is every unique gold span; in pipeline mode it
/// is the gold spans the extractor found, and an empty set yields an absent
/// value with a reason rather than 0. Missing predictions raise EvalError
/// listing the gaps.
PolarityAccuracyResult polarity_accuracy(
    const std::vector<LabeledSpanKey>& gold,
    const std::vector<PredictedPolarity>& predictions, PolarityEvalMode mode);

/// Shuffled fold ids, one per sentence. Folds partition [0, n) and sizes
/// differ by at most one. Requires 2 <= k <= n.
std::vector<int> fold_assignment(int n, int k, std::uint64_t seed);

struct CvConfig {
  int k = 5;
  std::uint64_t seed = 1;
  int tagger_epochs = 5;
  int classifier_epochs = 10;
  ChannelConfig tagger_channels{};
  ChannelConfig classifier_channels{};
  ModelDims dims{};
  int distance_clip_radius = 30;
};

struct FoldReport {
  int fold = 0;
  int train_sentences = 0;
  int eval_sentences = 0;
  SpanMetrics extraction;
  PolarityAccuracyResult polarity_isolated;  // classified on gold spans
  PolarityAccuracyResult polarity_pipeline;  // classified on extracted TPs
};

struct CvResult {
  std::vector<FoldReport> folds;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  std::optional<double> mean_polarity_isolated;
  std::optional<double> mean_polarity_pipeline;
};

/// K-fold cross-validation of the whole pipeline: per fold, both models are
/// trained from scratch on the other folds and scored on the held-out one.
/// Means are unweighted across folds. Model seeds and epoch shuffling derive
/// from config.seed, so a rerun reproduces everything bit for bit. The
/// callback, when given, receives each fold's trained models right after
/// evaluation (the CLI uses it to persist them).
using FoldModelSink = std::function<void(int, TaggerModel&, PolarityModel&)>;
CvResult cross_validate(std::span<const CorpusRecord> records,
                        std::shared_ptr<const FeatureResources> resources,
                        const CvConfig& config,
                        const FoldModelSink& on_fold = {});

std::string cv_report_text(const CvResult& result);
std::string cv_report_json(const CvResult& result);  // machine-readable form

}  // namespace absa
