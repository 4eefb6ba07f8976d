#include "absa/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "absa/errors.hpp"

namespace absa {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string key_str(const SpanKey& k) {
  return "(sentence " + std::to_string(k.sentence) + ", chars [" +
         std::to_string(k.begin) + ", " + std::to_string(k.end) + "))";
}

}  // namespace

std::vector<LabeledSpanKey> dedupe(const std::vector<LabeledSpanKey>& items) {
  std::vector<LabeledSpanKey> out;
  std::set<LabeledSpanKey> seen;
  out.reserve(items.size());
  for (const LabeledSpanKey& item : items) {
    if (seen.insert(item).second) out.push_back(item);
  }
  return out;
}

SpanMetrics span_metrics(std::span<const SpanKey> gold,
                         std::span<const SpanKey> predicted) {
  const std::set<SpanKey> gold_set(gold.begin(), gold.end());
  const std::set<SpanKey> pred_set(predicted.begin(), predicted.end());
  SpanMetrics m;
  for (const SpanKey& p : pred_set) {
    if (gold_set.count(p)) {
      ++m.true_positives;
    } else {
      ++m.false_positives;
    }
  }
  m.false_negatives =
      static_cast<std::int64_t>(gold_set.size()) - m.true_positives;
  const std::int64_t pred_total = m.true_positives + m.false_positives;
  const std::int64_t gold_total = m.true_positives + m.false_negatives;
  m.precision = pred_total > 0
                    ? static_cast<double>(m.true_positives) /
                          static_cast<double>(pred_total)
                    : 0.0;
  m.recall = gold_total > 0 ? static_cast<double>(m.true_positives) /
                                  static_cast<double>(gold_total)
                            : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

PolarityAccuracyResult polarity_accuracy(
    const std::vector<LabeledSpanKey>& gold,
    const std::vector<PredictedPolarity>& predictions, PolarityEvalMode mode) {
  const std::vector<LabeledSpanKey> unique_gold = dedupe(gold);
  std::set<SpanKey> gold_spans;
  for (const LabeledSpanKey& g : unique_gold) gold_spans.insert(g.span);

  std::map<SpanKey, Polarity> predicted;
  for (const PredictedPolarity& p : predictions) {
    auto [it, fresh] = predicted.emplace(p.span, p.polarity);
    if (!fresh && it->second != p.polarity) {
      throw EvalError("polarity_accuracy: conflicting predictions for " +
                      key_str(p.span));
    }
    if (!gold_spans.count(p.span)) {
      throw EvalError("polarity_accuracy: prediction for unknown span " +
                      key_str(p.span));
    }
  }

  if (mode == PolarityEvalMode::gold_spans) {
    std::string missing;
    for (const SpanKey& g : gold_spans) {
      if (!predicted.count(g)) {
        if (!missing.empty()) missing += ", ";
        missing += key_str(g);
      }
    }
    if (!missing.empty()) {
      throw EvalError("polarity_accuracy: no prediction for " + missing);
    }
  }

  PolarityAccuracyResult result;
  if (mode == PolarityEvalMode::pipeline_true_positives && predicted.empty()) {
    result.reason = "no correctly extracted spans to evaluate";
    return result;
  }
  for (const LabeledSpanKey& g : unique_gold) {
    auto it = predicted.find(g.span);
    if (it == predicted.end()) continue;  // outside the TP set
    ++result.total;
    if (it->second == g.polarity) ++result.correct;
  }
  if (result.total == 0) {
    result.reason = "evaluation span set is empty";
    return result;
  }
  result.value =
      static_cast<double>(result.correct) / static_cast<double>(result.total);
  return result;
}

std::vector<int> fold_assignment(int n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold_assignment: k must be >= 2");
  if (n < k) {
    throw ConfigError("fold_assignment: corpus of " + std::to_string(n) +
                      " sentences cannot be split into " + std::to_string(k) +
                      " folds");
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
  nn::Rng rng(seed);
  rng.shuffle(order);
  std::vector<int> fold(static_cast<std::size_t>(n), 0);
  // First n % k folds take one extra sentence.
  const int base = n / k, extra = n % k;
  std::size_t at = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    for (int j = 0; j < size; ++j) fold[order[at++]] = f;
  }
  return fold;
}

namespace {

struct FoldEvalData {
  std::vector<SpanKey> gold_spans;
  std::vector<LabeledSpanKey> gold_labeled;
  std::vector<SpanKey> predicted_spans;
  std::vector<PredictedPolarity> isolated_predictions;
  std::vector<PredictedPolarity> pipeline_predictions;
};

SpanKey char_key(int sentence, const CorpusRecord& rec,
                 const AspectSpan& span) {
  return SpanKey{sentence,
                 rec.tokens[static_cast<std::size_t>(span.start)].begin,
                 rec.tokens[static_cast<std::size_t>(span.end - 1)].end};
}

}  // namespace

CvResult cross_validate(std::span<const CorpusRecord> records,
                        std::shared_ptr<const FeatureResources> resources,
                        const CvConfig& config, const FoldModelSink& on_fold) {
  const int n = static_cast<int>(records.size());
  const std::vector<int> folds = fold_assignment(n, config.k, config.seed);

  CvResult result;
  double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
  double sum_iso = 0.0, sum_pipe = 0.0;
  int iso_folds = 0, pipe_folds = 0;

  for (int f = 0; f < config.k; ++f) {
    std::vector<CorpusRecord> train;
    std::vector<std::pair<int, const CorpusRecord*>> eval_set;
    for (int i = 0; i < n; ++i) {
      if (folds[static_cast<std::size_t>(i)] == f) {
        eval_set.emplace_back(i, &records[static_cast<std::size_t>(i)]);
      } else {
        train.push_back(records[static_cast<std::size_t>(i)]);
      }
    }

    const std::vector<LabeledSentence> train_sentences = to_labeled(train);
    const std::uint64_t fold_salt =
        config.seed * 1000003ull + static_cast<std::uint64_t>(f);

    TaggerModel tagger(resources, config.tagger_channels, fold_salt * 2 + 1,
                       config.dims);
    TrainOptions tagger_opts;
    tagger_opts.shuffle_seed = fold_salt * 2 + 1;
    train_tagger(tagger, train_sentences, config.tagger_epochs, tagger_opts);

    PolarityModel classifier(resources, config.classifier_channels,
                             fold_salt * 2 + 2, config.dims,
                             config.distance_clip_radius);
    TrainOptions classifier_opts;
    classifier_opts.shuffle_seed = fold_salt * 2 + 2;
    train_classifier(classifier, classifier_instances(train_sentences),
                     config.classifier_epochs, classifier_opts);

    FoldEvalData data;
    for (const auto& [sentence_id, rec] : eval_set) {
      const LabeledSentence labeled = to_labeled(*rec);

      std::set<SpanKey> seen_gold;
      for (std::size_t s = 0; s < rec->spans.size(); ++s) {
        const SpanKey key{sentence_id, rec->annotations[s].begin,
                          rec->annotations[s].end};
        data.gold_labeled.push_back(
            LabeledSpanKey{key, rec->annotations[s].polarity});
        if (seen_gold.insert(key).second) {
          data.gold_spans.push_back(key);
          auto [label, probs] = classifier.classify(labeled, rec->spans[s]);
          data.isolated_predictions.push_back(PredictedPolarity{key, label});
        }
      }

      const std::set<SpanKey> gold_here(seen_gold);
      for (const Opinion& op :
           extract_opinions(tagger, classifier, labeled)) {
        const SpanKey key = char_key(sentence_id, *rec, op.span);
        data.predicted_spans.push_back(key);
        if (gold_here.count(key)) {
          data.pipeline_predictions.push_back(
              PredictedPolarity{key, *op.span.polarity});
        }
      }
    }

    FoldReport report;
    report.fold = f;
    report.train_sentences = static_cast<int>(train.size());
    report.eval_sentences = static_cast<int>(eval_set.size());
    report.extraction = span_metrics(data.gold_spans, data.predicted_spans);
    report.polarity_isolated =
        polarity_accuracy(data.gold_labeled, data.isolated_predictions,
                          PolarityEvalMode::gold_spans);
    report.polarity_pipeline =
        polarity_accuracy(data.gold_labeled, data.pipeline_predictions,
                          PolarityEvalMode::pipeline_true_positives);

    sum_p += report.extraction.precision;
    sum_r += report.extraction.recall;
    sum_f1 += report.extraction.f1;
    if (report.polarity_isolated.value) {
      sum_iso += *report.polarity_isolated.value;
      ++iso_folds;
    }
    if (report.polarity_pipeline.value) {
      sum_pipe += *report.polarity_pipeline.value;
      ++pipe_folds;
    }
    result.folds.push_back(std::move(report));
    if (on_fold) on_fold(f, tagger, classifier);
  }

  const double kf = static_cast<double>(config.k);
  result.mean_precision = sum_p / kf;
  result.mean_recall = sum_r / kf;
  result.mean_f1 = sum_f1 / kf;
  if (iso_folds > 0) result.mean_polarity_isolated = sum_iso / iso_folds;
  if (pipe_folds > 0) result.mean_polarity_pipeline = sum_pipe / pipe_folds;
  return result;
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string opt_str(const PolarityAccuracyResult& r) {
  if (r.value) return fixed4(*r.value);
  return "n/a (" + r.reason + ")";
}

}  // namespace

std::string cv_report_text(const CvResult& result) {
  std::ostringstream out;
  out << "fold  train  eval   precision  recall    f1        polarity(gold)  "
         "polarity(pipeline)\n";
  for (const FoldReport& f : result.folds) {
    out << "  " << f.fold << "    " << f.train_sentences << "    "
        << f.eval_sentences << "      " << fixed4(f.extraction.precision)
        << "     " << fixed4(f.extraction.recall) << "    "
        << fixed4(f.extraction.f1) << "    " << opt_str(f.polarity_isolated)
        << "          " << opt_str(f.polarity_pipeline) << "\n";
  }
  out << "mean              " << fixed4(result.mean_precision) << "     "
      << fixed4(result.mean_recall) << "    " << fixed4(result.mean_f1);
  out << "    "
      << (result.mean_polarity_isolated
              ? fixed4(*result.mean_polarity_isolated)
              : std::string("n/a"));
  out << "          "
      << (result.mean_polarity_pipeline
              ? fixed4(*result.mean_polarity_pipeline)
              : std::string("n/a"));
  out << "\n";
  return out.str();
}

std::string cv_report_json(const CvResult& result) {
  ordered_json j;
  j["format"] = "absa-cv-report";
  j["version"] = 1;
  j["folds"] = ordered_json::array();
  for (const FoldReport& f : result.folds) {
    ordered_json fj;
    fj["fold"] = f.fold;
    fj["train_sentences"] = f.train_sentences;
    fj["eval_sentences"] = f.eval_sentences;
    fj["extraction"] = {{"true_positives", f.extraction.true_positives},
                        {"false_positives", f.extraction.false_positives},
                        {"false_negatives", f.extraction.false_negatives},
                        {"precision", f.extraction.precision},
                        {"recall", f.extraction.recall},
                        {"f1", f.extraction.f1}};
    auto acc = [](const PolarityAccuracyResult& r) {
      ordered_json a;
      a["evaluated"] = r.total;
      a["correct"] = r.correct;
      if (r.value) {
        a["accuracy"] = *r.value;
      } else {
        a["accuracy"] = nullptr;
        a["reason"] = r.reason;
      }
      return a;
    };
    fj["polarity_gold_spans"] = acc(f.polarity_isolated);
    fj["polarity_pipeline"] = acc(f.polarity_pipeline);
    j["folds"].push_back(fj);
  }
  ordered_json means;
  means["precision"] = result.mean_precision;
  means["recall"] = result.mean_recall;
  means["f1"] = result.mean_f1;
  means["polarity_gold_spans"] =
      result.mean_polarity_isolated
          ? ordered_json(*result.mean_polarity_isolated)
          : ordered_json(nullptr);
  means["polarity_pipeline"] =
      result.mean_polarity_pipeline
          ? ordered_json(*result.mean_polarity_pipeline)
          : ordered_json(nullptr);
  j["means"] = means;
  return j.dump(2) + "\n";
}

}  // namespace absa
