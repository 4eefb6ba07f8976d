#include "absa/models.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "absa/errors.hpp"
#include "absa/param_store.hpp"
#include "absa/textio.hpp"

namespace absa {

namespace {

using ordered_json = nlohmann::ordered_json;

Eigen::Index channel_dim(const FeatureResources& res,
                         const ChannelConfig& channels) {
  Eigen::Index dim = res.vectors.table.dim;
  if (channels.sentic) dim += SenticLexicon::kDim;
  if (channels.pos) dim += res.tagset.size();
  return dim;
}

std::vector<Vec> fused_token_features(const FeatureResources& res,
                                      const ChannelConfig& channels,
                                      const LabeledSentence& sentence) {
  if (sentence.pos.size() != sentence.tokens.size()) {
    throw AlignmentError("sentence has " +
                         std::to_string(sentence.tokens.size()) +
                         " tokens but " + std::to_string(sentence.pos.size()) +
                         " POS tags");
  }
  std::vector<Vec> words, sentics, tags;
  words.reserve(sentence.tokens.size());
  for (const std::string& t : sentence.tokens) {
    words.push_back(lookup(res.vectors, t));
  }
  std::vector<const std::vector<Vec>*> enabled{&words};
  if (channels.sentic) {
    sentics.reserve(sentence.tokens.size());
    for (const std::string& t : sentence.tokens) {
      sentics.push_back(res.sentic.lookup(t));
    }
    enabled.push_back(&sentics);
  }
  if (channels.pos) {
    tags.reserve(sentence.pos.size());
    for (const std::string& p : sentence.pos) {
      tags.push_back(res.tagset.onehot(p));
    }
    enabled.push_back(&tags);
  }
  return fuse(enabled);
}

void check_finite_loss(double loss) {
  if (!std::isfinite(loss)) {
    throw NumericError("training loss is not finite");
  }
}

void check_finite_params(const std::vector<Param*>& params) {
  for (const Param* p : params) {
    if (!p->value.allFinite()) {
      throw NumericError("parameter " + p->name +
                         " contains non-finite values");
    }
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed * 0x9e3779b97f4a7c15ull + salt;
}

}  // namespace

LabeledSentence to_labeled(const CorpusRecord& record) {
  LabeledSentence s;
  s.tokens.reserve(record.tokens.size());
  for (const Token& t : record.tokens) s.tokens.push_back(t.text);
  s.pos = record.pos;
  s.spans = record.spans;
  return s;
}

std::vector<LabeledSentence> to_labeled(std::span<const CorpusRecord> records) {
  std::vector<LabeledSentence> out;
  out.reserve(records.size());
  for (const CorpusRecord& r : records) out.push_back(to_labeled(r));
  return out;
}

TaggerOutput decode_tag_distributions(std::vector<Vec> distributions) {
  std::vector<Iob2Tag> raw;
  raw.reserve(distributions.size());
  for (const Vec& q : distributions) {
    raw.push_back(static_cast<Iob2Tag>(nn::argmax_lowest(q)));
  }
  TaggerOutput out;
  out.distributions = std::move(distributions);
  out.tags = iob2_repair(std::move(raw));
  out.spans = iob2_decode(out.tags);
  return out;
}

TaggerModel::TaggerModel(std::shared_ptr<const FeatureResources> resources,
                         ChannelConfig channels, std::uint64_t seed,
                         ModelDims dims)
    : resources_(std::move(resources)),
      channels_(channels),
      seed_(seed),
      dims_(dims),
      input_dim_(channel_dim(*resources_, channels_)),
      fwd_("tagger.fwd", input_dim_, dims.hidden),
      bwd_("tagger.bwd", input_dim_, dims.hidden),
      hidden_("tagger.hidden", 2 * dims.hidden, dims.dense),
      out_("tagger.out", dims.dense, kIob2TagCount) {
  nn::Rng rng(seed_);
  fwd_.init(rng);
  bwd_.init(rng);
  hidden_.init(rng);
  out_.init(rng);
}

std::vector<Param*> TaggerModel::params() {
  std::vector<Param*> all;
  for (Param* p : fwd_.params()) all.push_back(p);
  for (Param* p : bwd_.params()) all.push_back(p);
  for (Param* p : hidden_.params()) all.push_back(p);
  for (Param* p : out_.params()) all.push_back(p);
  return all;
}

std::vector<Vec> TaggerModel::features(const LabeledSentence& sentence) const {
  return fused_token_features(*resources_, channels_, sentence);
}

std::vector<Var> TaggerModel::logits(Tape& tape,
                                     const std::vector<Vec>& features) {
  std::vector<Var> inputs;
  inputs.reserve(features.size());
  for (const Vec& f : features) inputs.push_back(tape.constant(f));
  std::vector<Var> states = nn::bigru_run(tape, fwd_, bwd_, inputs);
  std::vector<Var> out;
  out.reserve(states.size());
  for (Var g : states) {
    Var h = tape.tanh(hidden_.apply(tape, g));
    out.push_back(out_.apply(tape, h));
  }
  return out;
}

TaggerOutput TaggerModel::tag(const LabeledSentence& sentence) {
  Tape tape;
  std::vector<Var> logit_nodes = logits(tape, features(sentence));
  std::vector<Vec> distributions;
  distributions.reserve(logit_nodes.size());
  for (Var l : logit_nodes) {
    distributions.push_back(nn::softmax(tape.value(l)));
  }
  return decode_tag_distributions(std::move(distributions));
}

PolarityModel::PolarityModel(std::shared_ptr<const FeatureResources> resources,
                             ChannelConfig channels, std::uint64_t seed,
                             ModelDims dims, int distance_clip_radius)
    : resources_(std::move(resources)),
      channels_(channels),
      seed_(seed),
      dims_(dims),
      input_dim_(channel_dim(*resources_, channels_) +
                 DistanceEmbeddingTable::kDim),
      distance_(distance_clip_radius),
      fwd_("classifier.fwd", input_dim_, dims.hidden),
      bwd_("classifier.bwd", input_dim_, dims.hidden),
      hidden_("classifier.hidden", 2 * dims.hidden, dims.dense),
      out_("classifier.out", dims.dense, kPolarityCount) {
  nn::Rng rng(seed_);
  distance_.init(rng);
  fwd_.init(rng);
  bwd_.init(rng);
  hidden_.init(rng);
  out_.init(rng);
}

std::vector<Param*> PolarityModel::params() {
  std::vector<Param*> all;
  all.push_back(&distance_.table);
  for (Param* p : fwd_.params()) all.push_back(p);
  for (Param* p : bwd_.params()) all.push_back(p);
  for (Param* p : hidden_.params()) all.push_back(p);
  for (Param* p : out_.params()) all.push_back(p);
  return all;
}

std::vector<Vec> PolarityModel::base_features(
    const LabeledSentence& sentence) const {
  return fused_token_features(*resources_, channels_, sentence);
}

Var PolarityModel::logits(Tape& tape, const LabeledSentence& sentence,
                          const AspectSpan& span) {
  const int n = static_cast<int>(sentence.tokens.size());
  if (span.start < 0 || span.start >= span.end || span.end > n) {
    throw SpanError("classify: span [" + std::to_string(span.start) + ", " +
                    std::to_string(span.end) +
                    ") invalid for sentence of length " + std::to_string(n));
  }
  const std::vector<Vec> base = base_features(sentence);
  const std::vector<int> offsets = distance_tags(n, span.start, span.end);

  std::vector<Var> inputs;
  inputs.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    Var b = tape.constant(base[i]);
    Var d = tape.param_row(distance_.table,
                           distance_.row_for_offset(offsets[i]));
    inputs.push_back(tape.concat(b, d));
  }

  Var h0f = tape.constant(Vec::Zero(dims_.hidden));
  Var h0b = tape.constant(Vec::Zero(dims_.hidden));
  std::vector<Var> forward = nn::gru_run(tape, fwd_, inputs, h0f);
  std::vector<Var> reversed(inputs.rbegin(), inputs.rend());
  std::vector<Var> backward = nn::gru_run(tape, bwd_, reversed, h0b);

  // The sentence representation is the forward run's last state next to the
  // backward run's last state (the one for the first token).
  Var pooled = tape.concat(forward.back(), backward.back());
  Var h = tape.tanh(hidden_.apply(tape, pooled));
  return out_.apply(tape, h);
}

std::pair<Polarity, Vec> PolarityModel::classify(
    const LabeledSentence& sentence, const AspectSpan& span) {
  Tape tape;
  Var l = logits(tape, sentence, span);
  Vec probs = nn::softmax(tape.value(l));
  return {static_cast<Polarity>(nn::argmax_lowest(probs)), std::move(probs)};
}

namespace {

std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle,
                                     nn::Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) rng.shuffle(order);
  return order;
}

}  // namespace

std::vector<double> train_tagger(TaggerModel& model,
                                 std::span<const LabeledSentence> corpus,
                                 int epochs, const TrainOptions& options) {
  if (corpus.empty()) throw ConfigError("train_tagger: empty corpus");
  if (epochs < 1) throw ConfigError("train_tagger: epochs must be >= 1");

  std::vector<std::vector<Vec>> features;
  std::vector<std::vector<Vec>> expected;
  features.reserve(corpus.size());
  expected.reserve(corpus.size());
  for (const LabeledSentence& s : corpus) {
    features.push_back(model.features(s));
    std::vector<Iob2Tag> tags =
        iob2_encode(s.spans, static_cast<int>(s.tokens.size()));
    std::vector<Vec> onehots;
    onehots.reserve(tags.size());
    for (Iob2Tag t : tags) onehots.push_back(tag_onehot(t));
    expected.push_back(std::move(onehots));
  }

  const std::vector<Param*> params = model.params();
  nn::Adam adam(params, options.adam);
  nn::Rng shuffle_rng(mix_seed(options.shuffle_seed, 0xA11));
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(epochs));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t i :
         epoch_order(corpus.size(), options.shuffle, shuffle_rng)) {
      if (features[i].empty()) continue;
      for (Param* p : params) p->zero_grad();
      Tape tape;
      std::vector<Var> logit_nodes = model.logits(tape, features[i]);
      std::vector<Var> losses;
      losses.reserve(logit_nodes.size());
      for (std::size_t t = 0; t < logit_nodes.size(); ++t) {
        losses.push_back(
            tape.softmax_cross_entropy(logit_nodes[t], expected[i][t]).first);
      }
      Var total = tape.sum(losses);
      const double loss = tape.value(total)[0];
      check_finite_loss(loss);
      epoch_loss += loss;
      tape.backward(total);
      adam.step();
    }
    check_finite_params(params);
    trace.push_back(epoch_loss);
    if (options.on_epoch && !options.on_epoch(epoch, epoch_loss)) break;
  }
  return trace;
}

std::vector<AspectInstance> classifier_instances(
    std::span<const LabeledSentence> corpus) {
  std::vector<AspectInstance> out;
  for (const LabeledSentence& s : corpus) {
    for (const AspectSpan& span : s.spans) {
      if (!span.polarity) continue;
      out.push_back(AspectInstance{s, span, *span.polarity});
    }
  }
  return out;
}

std::vector<double> train_classifier(PolarityModel& model,
                                     std::span<const AspectInstance> instances,
                                     int epochs,
                                     const TrainOptions& options) {
  if (instances.empty()) throw ConfigError("train_classifier: no instances");
  if (epochs < 1) throw ConfigError("train_classifier: epochs must be >= 1");

  const std::vector<Param*> params = model.params();
  nn::Adam adam(params, options.adam);
  nn::Rng shuffle_rng(mix_seed(options.shuffle_seed, 0xB22));
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(epochs));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t i :
         epoch_order(instances.size(), options.shuffle, shuffle_rng)) {
      const AspectInstance& inst = instances[i];
      for (Param* p : params) p->zero_grad();
      Tape tape;
      Var logits = model.logits(tape, inst.sentence, inst.span);
      Vec expected = Vec::Zero(kPolarityCount);
      expected[static_cast<int>(inst.label)] = 1.0;
      auto [loss_var, probs] = tape.softmax_cross_entropy(logits, expected);
      const double loss = tape.value(loss_var)[0];
      check_finite_loss(loss);
      epoch_loss += loss;
      tape.backward(loss_var);
      adam.step();
    }
    check_finite_params(params);
    trace.push_back(epoch_loss);
    if (options.on_epoch && !options.on_epoch(epoch, epoch_loss)) break;
  }
  return trace;
}

std::vector<Opinion> extract_opinions(TaggerModel& tagger,
                                      PolarityModel& classifier,
                                      const LabeledSentence& sentence) {
  TaggerOutput tagged = tagger.tag(sentence);
  std::vector<Opinion> opinions;
  opinions.reserve(tagged.spans.size());
  for (const AspectSpan& span : tagged.spans) {
    auto [label, probs] = classifier.classify(sentence, span);
    Opinion o;
    o.span = span;
    o.span.polarity = label;
    o.probabilities = std::move(probs);
    opinions.push_back(std::move(o));
  }
  return opinions;
}

namespace {

ordered_json model_manifest(const std::string& kind, std::uint64_t seed,
                            const ChannelConfig& channels,
                            const ModelDims& dims,
                            const FeatureResources& res,
                            Eigen::Index input_dim) {
  ordered_json j;
  j["format"] = "absa-model";
  j["version"] = 1;
  j["kind"] = kind;
  j["seed"] = seed;
  j["channels"] = {{"sentic", channels.sentic}, {"pos", channels.pos}};
  ordered_json d;
  d["word"] = res.vectors.table.dim;
  d["sentic"] = channels.sentic ? SenticLexicon::kDim : 0;
  d["pos"] = channels.pos ? res.tagset.size() : 0;
  d["input"] = input_dim;
  d["hidden"] = dims.hidden;
  d["dense"] = dims.dense;
  j["dims"] = d;
  j["activation"] = "tanh";
  return j;
}

ordered_json read_manifest(const std::string& stem, const std::string& kind) {
  const std::string path = stem + ".manifest.json";
  ordered_json j;
  try {
    j = ordered_json::parse(textio::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": invalid JSON: " + e.what());
  }
  if (j.value("format", "") != "absa-model" || j.value("kind", "") != kind) {
    throw FormatError(path + ": not a " + kind + " manifest");
  }
  return j;
}

}  // namespace

void save_tagger(TaggerModel& model, const std::string& stem) {
  ordered_json j = model_manifest("tagger", model.seed_, model.channels_,
                                  model.dims_, *model.resources_,
                                  model.input_dim_);
  j["dims"]["output"] = kIob2TagCount;
  j["tags"] = {"I", "O", "B"};
  textio::atomic_write(stem + ".manifest.json", [&](std::ostream& out) {
    out << j.dump(2) << '\n';
  });
  const std::vector<Param*> params = model.params();
  nn::save_params(stem + ".params", params);
}

TaggerModel load_tagger(const std::string& stem,
                        std::shared_ptr<const FeatureResources> resources) {
  ordered_json j = read_manifest(stem, "tagger");
  try {
    ChannelConfig channels{j.at("channels").at("sentic").get<bool>(),
                           j.at("channels").at("pos").get<bool>()};
    ModelDims dims{j.at("dims").at("hidden").get<Eigen::Index>(),
                   j.at("dims").at("dense").get<Eigen::Index>()};
    TaggerModel model(std::move(resources), channels,
                      j.at("seed").get<std::uint64_t>(), dims);
    if (model.input_dim() != j.at("dims").at("input").get<Eigen::Index>()) {
      throw FormatError(stem + ".manifest.json: input dim " +
                        std::to_string(j.at("dims").at("input").get<long>()) +
                        " does not match the given resources (" +
                        std::to_string(model.input_dim()) + ")");
    }
    const std::vector<Param*> params = model.params();
    nn::load_params(stem + ".params", params);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(stem + ".manifest.json: " + e.what());
  }
}

void save_classifier(PolarityModel& model, const std::string& stem) {
  ordered_json j = model_manifest("classifier", model.seed_, model.channels_,
                                  model.dims_, *model.resources_,
                                  model.input_dim_);
  j["dims"]["output"] = kPolarityCount;
  j["labels"] = {"positive", "negative"};
  j["distance"] = {{"clip_radius", model.distance_.clip_radius},
                   {"dim", DistanceEmbeddingTable::kDim}};
  textio::atomic_write(stem + ".manifest.json", [&](std::ostream& out) {
    out << j.dump(2) << '\n';
  });
  const std::vector<Param*> params = model.params();
  nn::save_params(stem + ".params", params);
}

PolarityModel load_classifier(
    const std::string& stem,
    std::shared_ptr<const FeatureResources> resources) {
  ordered_json j = read_manifest(stem, "classifier");
  try {
    ChannelConfig channels{j.at("channels").at("sentic").get<bool>(),
                           j.at("channels").at("pos").get<bool>()};
    ModelDims dims{j.at("dims").at("hidden").get<Eigen::Index>(),
                   j.at("dims").at("dense").get<Eigen::Index>()};
    PolarityModel model(std::move(resources), channels,
                        j.at("seed").get<std::uint64_t>(), dims,
                        j.at("distance").at("clip_radius").get<int>());
    if (model.input_dim() != j.at("dims").at("input").get<Eigen::Index>()) {
      throw FormatError(stem + ".manifest.json: input dim does not match "
                        "the given resources");
    }
    const std::vector<Param*> params = model.params();
    nn::load_params(stem + ".params", params);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(stem + ".manifest.json: " + e.what());
  }
}

}  // namespace absa
