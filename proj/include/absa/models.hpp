#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absa/corpus.hpp"
#include "absa/embeddings.hpp"
#include "absa/features.hpp"
#include "absa/iob2.hpp"
#include "absa/nn.hpp"

namespace absa {

using ad::Param;
using ad::Tape;
using ad::Var;

/// Which optional feature channels feed the networks. The word-vector
/// channel is always on; the polarity classifier additionally always uses
/// the distance channel.
struct ChannelConfig {
  bool sentic = true;
  bool pos = true;
};

/// Everything the models read per token: word vectors, the affective
/// lexicon and the POS inventory. Shared read-only between models.
struct FeatureResources {
  WordVectors vectors;
  SenticLexicon sentic;
  PosTagSet tagset;
};

/// Model-facing view of a sentence: aligned tokens and POS tags plus the
/// gold aspect spans (polarity filled where known).
struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> pos;
  std::vector<AspectSpan> spans;
};

LabeledSentence to_labeled(const CorpusRecord& record);
std::vector<LabeledSentence> to_labeled(std::span<const CorpusRecord> records);

struct ModelDims {
  Eigen::Index hidden = 25;  // per direction
  Eigen::Index dense = 50;
};

struct TaggerOutput {
  std::vector<Vec> distributions;  // per token, over (I, O, B)
  std::vector<Iob2Tag> tags;       // after repair
  std::vector<AspectSpan> spans;   // decoded, by start order
};

/// Argmax per token (ties to the lowest tag index), then repair, then
/// decode. Exposed separately so the post-processing is testable on
/// synthetic distributions.
TaggerOutput decode_tag_distributions(std::vector<Vec> distributions);

/// Aspect-term extractor: per-token features through a bidirectional GRU,
/// a dense tanh layer and a 3-way softmax.
class TaggerModel {
 public:
  TaggerModel(std::shared_ptr<const FeatureResources> resources,
              ChannelConfig channels, std::uint64_t seed, ModelDims dims = {});

  Eigen::Index input_dim() const { return input_dim_; }
  const ChannelConfig& channels() const { return channels_; }
  const ModelDims& dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }
  const std::shared_ptr<const FeatureResources>& resources() const {
    return resources_;
  }

  std::vector<Param*> params();

  /// Fused per-token input vectors; AlignmentError when POS tags and tokens
  /// disagree in length.
  std::vector<Vec> features(const LabeledSentence& sentence) const;

  /// Per-token tag logits on the caller's tape (training path).
  std::vector<Var> logits(Tape& tape, const std::vector<Vec>& features);

  /// Full inference: distributions, repaired tags and decoded spans.
  TaggerOutput tag(const LabeledSentence& sentence);

  friend void save_tagger(TaggerModel& model, const std::string& stem);

 private:
  std::shared_ptr<const FeatureResources> resources_;
  ChannelConfig channels_;
  std::uint64_t seed_;
  ModelDims dims_;
  Eigen::Index input_dim_;
  nn::GruCellParams fwd_, bwd_;
  nn::DenseParams hidden_, out_;
};

/// Aspect polarity classifier: per-token features plus learnable distance
/// embeddings through a bidirectional GRU; the two final states feed a dense
/// tanh layer and a 2-way softmax.
class PolarityModel {
 public:
  PolarityModel(std::shared_ptr<const FeatureResources> resources,
                ChannelConfig channels, std::uint64_t seed,
                ModelDims dims = {}, int distance_clip_radius = 30);

  Eigen::Index input_dim() const { return input_dim_; }
  const ChannelConfig& channels() const { return channels_; }
  const ModelDims& dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }
  DistanceEmbeddingTable& distance_table() { return distance_; }
  const std::shared_ptr<const FeatureResources>& resources() const {
    return resources_;
  }

  std::vector<Param*> params();

  /// Label logits for one aspect span on the caller's tape. Invalid spans
  /// raise SpanError.
  Var logits(Tape& tape, const LabeledSentence& sentence,
             const AspectSpan& span);

  /// (label, probabilities over (positive, negative)); ties resolve to
  /// positive.
  std::pair<Polarity, Vec> classify(const LabeledSentence& sentence,
                                    const AspectSpan& span);

  friend void save_classifier(PolarityModel& model, const std::string& stem);

 private:
  std::vector<Vec> base_features(const LabeledSentence& sentence) const;

  std::shared_ptr<const FeatureResources> resources_;
  ChannelConfig channels_;
  std::uint64_t seed_;
  ModelDims dims_;
  Eigen::Index input_dim_;
  DistanceEmbeddingTable distance_;
  nn::GruCellParams fwd_, bwd_;
  nn::DenseParams hidden_, out_;
};

struct TrainOptions {
  std::uint64_t shuffle_seed = 1;
  bool shuffle = true;  // deterministic permutation per epoch when true
  nn::AdamConfig adam{};
  // Called after each epoch with (epoch index, summed loss); returning false
  // stops training early. The loss trace keeps the completed epochs.
  std::function<bool(int, double)> on_epoch{};
};

/// Trains the tagger with one Adam step per sentence on the summed per-token
/// cross-entropy. Returns the per-epoch loss trace (length == epochs).
/// Empty corpus or epochs < 1 raise ConfigError; a non-finite loss raises
/// NumericError.
std::vector<double> train_tagger(TaggerModel& model,
                                 std::span<const LabeledSentence> corpus,
                                 int epochs, const TrainOptions& options = {});

/// One classifier training item: a sentence, one gold span in it, the label.
struct AspectInstance {
  LabeledSentence sentence;
  AspectSpan span;
  Polarity label = Polarity::positive;
};

/// All labeled spans of the given sentences as classifier instances.
std::vector<AspectInstance> classifier_instances(
    std::span<const LabeledSentence> corpus);

std::vector<double> train_classifier(PolarityModel& model,
                                     std::span<const AspectInstance> instances,
                                     int epochs,
                                     const TrainOptions& options = {});

struct Opinion {
  AspectSpan span;  // polarity filled in
  Vec probabilities;
};

/// The two-step pipeline: every span the tagger finds, classified, in span
/// start order.
std::vector<Opinion> extract_opinions(TaggerModel& tagger,
                                      PolarityModel& classifier,
                                      const LabeledSentence& sentence);

/// Persists parameters (stem + ".params") and a manifest describing the
/// architecture (stem + ".manifest.json"). Loading validates the manifest
/// against the given resources.
void save_tagger(TaggerModel& model, const std::string& stem);
TaggerModel load_tagger(const std::string& stem,
                        std::shared_ptr<const FeatureResources> resources);
void save_classifier(PolarityModel& model, const std::string& stem);
PolarityModel load_classifier(
    const std::string& stem,
    std::shared_ptr<const FeatureResources> resources);

}  // namespace absa
