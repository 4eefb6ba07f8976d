#include "absa/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "absa/corpus.hpp"
#include "absa/errors.hpp"
#include "absa/eval.hpp"
#include "absa/models.hpp"
#include "absa/retrofit.hpp"
#include "absa/synthetic.hpp"
#include "absa/textio.hpp"

namespace absa::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct ResourcePaths {
  std::string embeddings;
  std::string sentic;
  std::string tagset;
};

void add_resource_options(CLI::App* cmd, ResourcePaths& paths,
                          bool sentic_required) {
  cmd->add_option("--embeddings", paths.embeddings, "word vector text file")
      ->required();
  auto* sentic =
      cmd->add_option("--sentic", paths.sentic, "affective lexicon TSV");
  if (sentic_required) sentic->required();
  cmd->add_option("--tagset", paths.tagset,
                  "POS tag inventory, one tag per line (default: built-in "
                  "45-tag set)");
}

std::shared_ptr<const FeatureResources> load_resources(
    const ResourcePaths& paths) {
  WordVectors wv = load_embeddings(paths.embeddings);
  SenticLexicon sentic;
  if (!paths.sentic.empty()) sentic = SenticLexicon::load(paths.sentic);
  PosTagSet tagset = paths.tagset.empty() ? synth::penn_treebank_tagset()
                                          : PosTagSet::load(paths.tagset);
  return std::make_shared<FeatureResources>(FeatureResources{
      std::move(wv), std::move(sentic), std::move(tagset)});
}

std::vector<CorpusRecord> load_training_corpus(const std::string& path,
                                               int unk_threshold) {
  IngestResult ingested = ingest_corpus(path);
  if (ingested.dropped.total() > 0) {
    const DropCounts& d = ingested.dropped;
    std::cerr << "ingest: dropped " << d.total() << " annotation(s): "
              << d.null_aspect << " null-aspect, " << d.polarity_filtered
              << " non-binary polarity, " << d.offset_misaligned
              << " offset misalignment, " << d.overlapping << " overlapping, "
              << d.duplicate << " duplicate\n";
  }
  apply_unk_threshold(ingested.records, unk_threshold);
  return std::move(ingested.records);
}

ordered_json train_manifest(const std::string& kind, std::uint64_t seed,
                            int epochs, int unk_threshold,
                            const ChannelConfig& channels,
                            const std::string& corpus_path,
                            const ResourcePaths& paths,
                            std::size_t examples_per_epoch,
                            const std::vector<double>& trace) {
  ordered_json j;
  j["format"] = "absa-training-run";
  j["version"] = 1;
  j["kind"] = kind;
  j["seed"] = seed;
  j["epochs"] = epochs;
  j["steps"] = epochs * static_cast<std::int64_t>(examples_per_epoch);
  j["unk_threshold"] = unk_threshold;
  j["channels"] = {{"sentic", channels.sentic}, {"pos", channels.pos}};
  j["inputs"] = {{"corpus", corpus_path},
                 {"embeddings", paths.embeddings},
                 {"sentic", paths.sentic},
                 {"tagset", paths.tagset}};
  j["loss_trace"] = trace;
  return j;
}

void write_json(const std::string& path, const ordered_json& j) {
  textio::atomic_write(path,
                       [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

int command_gen_corpus(const std::string& out_dir, int sentences,
                       std::uint64_t seed, int dim) {
  synth::Options opt;
  opt.sentences = sentences;
  opt.seed = seed;
  opt.embedding_dim = dim;
  synth::Dataset data = synth::generate(opt);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_corpus((dir / "corpus.jsonl").string(), data.records);
  save_embeddings((dir / "embeddings.txt").string(), data.resources.vectors);

  textio::atomic_write((dir / "sentic.tsv").string(), [&](std::ostream& out) {
    // Stable order: the lexicon itself hashes, so write sorted.
    std::vector<std::string> words;
    for (const CorpusRecord& rec : data.records) {
      for (const Token& t : rec.tokens) {
        if (data.resources.sentic.contains(t.text)) words.push_back(t.text);
      }
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (const std::string& w : words) {
      const Vec v = data.resources.sentic.lookup(w);
      out << w;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        out << '\t' << textio::format_double(v[i]);
      }
      out << '\n';
    }
  });

  textio::atomic_write((dir / "tagset.txt").string(), [&](std::ostream& out) {
    for (const std::string& t : data.resources.tagset.tags()) out << t << '\n';
  });

  textio::atomic_write((dir / "synonyms.txt").string(),
                       [&](std::ostream& out) {
                         for (const std::string& line : data.synonym_lines) {
                           out << line << '\n';
                         }
                       });

  std::cout << "wrote " << data.records.size() << " sentences to " << out_dir
            << "\n";
  return 0;
}

int command_retrofit(const std::string& embeddings_path,
                     const std::string& graph_path,
                     const std::string& out_path, int iterations) {
  WordVectors wv = load_embeddings(embeddings_path);
  LexicalGraph graph = load_graph(graph_path, wv.vocab);
  EmbeddingTable fitted = retrofit(wv.table, graph, iterations);
  WordVectors out{std::move(wv.vocab), std::move(fitted)};
  ensure_parent_dir(out_path);
  save_embeddings(out_path, out);
  std::cout << "retrofitted " << out.vocab.size() << " vectors ("
            << graph.edge_count() << " edges, " << iterations
            << " iterations) to " << out_path << "\n";
  return 0;
}

int command_train_tagger(const std::string& corpus_path,
                         const ResourcePaths& resource_paths,
                         const std::string& out_stem, int epochs,
                         std::uint64_t seed, const ChannelConfig& channels,
                         int unk_threshold) {
  auto resources = load_resources(resource_paths);
  std::vector<CorpusRecord> records =
      load_training_corpus(corpus_path, unk_threshold);
  const std::vector<LabeledSentence> sentences = to_labeled(records);

  TaggerModel model(resources, channels, seed);
  TrainOptions opts;
  opts.shuffle_seed = seed;
  const std::vector<double> trace =
      train_tagger(model, sentences, epochs, opts);

  ensure_parent_dir(out_stem);
  save_tagger(model, out_stem);
  write_json(out_stem + ".run.json",
             train_manifest("tagger", seed, epochs, unk_threshold, channels,
                            corpus_path, resource_paths, sentences.size(),
                            trace));
  std::cout << "trained tagger on " << sentences.size() << " sentences, "
            << "final epoch loss " << textio::format_double(trace.back())
            << "\n";
  return 0;
}

int command_train_classifier(const std::string& corpus_path,
                             const ResourcePaths& resource_paths,
                             const std::string& out_stem, int epochs,
                             std::uint64_t seed, const ChannelConfig& channels,
                             int unk_threshold, int clip_radius) {
  auto resources = load_resources(resource_paths);
  std::vector<CorpusRecord> records =
      load_training_corpus(corpus_path, unk_threshold);
  const std::vector<LabeledSentence> sentences = to_labeled(records);
  const std::vector<AspectInstance> instances =
      classifier_instances(sentences);

  PolarityModel model(resources, channels, seed, ModelDims{}, clip_radius);
  TrainOptions opts;
  opts.shuffle_seed = seed;
  const std::vector<double> trace =
      train_classifier(model, instances, epochs, opts);

  ensure_parent_dir(out_stem);
  save_classifier(model, out_stem);
  write_json(out_stem + ".run.json",
             train_manifest("classifier", seed, epochs, unk_threshold,
                            channels, corpus_path, resource_paths,
                            instances.size(), trace));
  std::cout << "trained classifier on " << instances.size() << " instances, "
            << "final epoch loss " << textio::format_double(trace.back())
            << "\n";
  return 0;
}

int command_extract(const std::string& input_path,
                    const ResourcePaths& resource_paths,
                    const std::string& tagger_stem,
                    const std::string& classifier_stem,
                    const std::string& out_path) {
  auto resources = load_resources(resource_paths);
  TaggerModel tagger = load_tagger(tagger_stem, resources);
  PolarityModel classifier = load_classifier(classifier_stem, resources);

  IngestResult ingested = ingest_corpus(input_path);
  ensure_parent_dir(out_path);
  textio::atomic_write(out_path, [&](std::ostream& out) {
    for (const CorpusRecord& rec : ingested.records) {
      const LabeledSentence sentence = to_labeled(rec);
      ordered_json j;
      j["text"] = rec.text;
      j["opinions"] = ordered_json::array();
      for (const Opinion& op :
           extract_opinions(tagger, classifier, sentence)) {
        const int begin =
            rec.tokens[static_cast<std::size_t>(op.span.start)].begin;
        const int end =
            rec.tokens[static_cast<std::size_t>(op.span.end - 1)].end;
        j["opinions"].push_back(
            {{"begin", begin},
             {"end", end},
             {"term", rec.text.substr(static_cast<std::size_t>(begin),
                                      static_cast<std::size_t>(end - begin))},
             {"polarity", to_string(*op.span.polarity)}});
      }
      out << j.dump() << '\n';
    }
  });
  std::cout << "extracted opinions for " << ingested.records.size()
            << " sentences to " << out_path << "\n";
  return 0;
}

int command_eval_cv(const std::string& corpus_path,
                    const ResourcePaths& resource_paths,
                    const std::string& out_dir, const CvConfig& config,
                    int unk_threshold) {
  auto resources = load_resources(resource_paths);
  std::vector<CorpusRecord> records =
      load_training_corpus(corpus_path, unk_threshold);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  CvResult result = cross_validate(
      records, resources, config,
      [&](int fold, TaggerModel& tagger, PolarityModel& classifier) {
        const std::string stem = (dir / ("fold" + std::to_string(fold))).string();
        save_tagger(tagger, stem + ".tagger");
        save_classifier(classifier, stem + ".classifier");
      });

  const std::string text = cv_report_text(result);
  textio::atomic_write((dir / "report.txt").string(),
                       [&](std::ostream& out) { out << text; });
  textio::atomic_write((dir / "report.json").string(), [&](std::ostream& out) {
    out << cv_report_json(result);
  });
  std::cout << text;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Aspect-based sentiment analysis engine", "absa-cli"};
  app.require_subcommand(1);

  // gen-corpus
  std::string gen_out = "synthetic";
  int gen_sentences = 100;
  std::uint64_t gen_seed = 7;
  int gen_dim = 100;
  CLI::App* gen = app.add_subcommand(
      "gen-corpus", "generate the synthetic corpus and its resources");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--sentences", gen_sentences, "number of sentences");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--dim", gen_dim, "word vector dimension");

  // retrofit
  std::string retro_embeddings, retro_graph, retro_out;
  int retro_iterations = 10;
  CLI::App* retro = app.add_subcommand(
      "retrofit", "fit word vectors to a synonym graph");
  retro->add_option("--embeddings", retro_embeddings, "input word vectors")
      ->required();
  retro->add_option("--graph", retro_graph, "synonym lines: word neighbor...")
      ->required();
  retro->add_option("--out", retro_out, "output word vectors")->required();
  retro->add_option("--iterations", retro_iterations, "full update sweeps");

  // shared training options
  auto add_train_options = [](CLI::App* cmd, std::string& corpus,
                              ResourcePaths& paths, std::string& out,
                              int& epochs, std::uint64_t& seed,
                              bool& no_sentic, bool& no_pos,
                              int& unk_threshold) {
    cmd->add_option("--corpus", corpus, "line-delimited JSON corpus")
        ->required();
    add_resource_options(cmd, paths, false);
    cmd->add_option("--out", out, "output stem for model files")->required();
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--seed", seed, "initialization and shuffling seed");
    cmd->add_flag("--no-sentic", no_sentic, "disable the affective channel");
    cmd->add_flag("--no-pos", no_pos, "disable the POS channel");
    cmd->add_option("--unk-threshold", unk_threshold,
                    "replace words seen fewer times than this with the "
                    "placeholder (0 disables)");
  };

  // train-tagger
  std::string tt_corpus, tt_out;
  ResourcePaths tt_paths;
  int tt_epochs = 5;
  std::uint64_t tt_seed = 1;
  bool tt_no_sentic = false, tt_no_pos = false;
  int tt_unk = 10;
  CLI::App* tt =
      app.add_subcommand("train-tagger", "train the aspect-term extractor");
  add_train_options(tt, tt_corpus, tt_paths, tt_out, tt_epochs, tt_seed,
                    tt_no_sentic, tt_no_pos, tt_unk);

  // train-classifier
  std::string tc_corpus, tc_out;
  ResourcePaths tc_paths;
  int tc_epochs = 10;
  std::uint64_t tc_seed = 1;
  bool tc_no_sentic = false, tc_no_pos = false;
  int tc_unk = 10;
  int tc_clip = 30;
  CLI::App* tc = app.add_subcommand("train-classifier",
                                    "train the aspect polarity classifier");
  add_train_options(tc, tc_corpus, tc_paths, tc_out, tc_epochs, tc_seed,
                    tc_no_sentic, tc_no_pos, tc_unk);
  tc->add_option("--clip-radius", tc_clip,
                 "distance embedding clip radius in tokens");

  // extract
  std::string ex_input, ex_tagger, ex_classifier, ex_out;
  ResourcePaths ex_paths;
  CLI::App* ex = app.add_subcommand(
      "extract", "run the two-step pipeline over sentences");
  ex->add_option("--input", ex_input, "line-delimited JSON sentences")
      ->required();
  add_resource_options(ex, ex_paths, false);
  ex->add_option("--tagger", ex_tagger, "tagger model stem")->required();
  ex->add_option("--classifier", ex_classifier, "classifier model stem")
      ->required();
  ex->add_option("--out", ex_out, "output path")->required();

  // eval-cv
  std::string cv_corpus, cv_out;
  ResourcePaths cv_paths;
  CvConfig cv_config;
  bool cv_no_sentic = false, cv_no_pos = false;
  int cv_unk = 10;
  CLI::App* cv = app.add_subcommand(
      "eval-cv", "k-fold cross-validation of the full pipeline");
  cv->add_option("--corpus", cv_corpus, "line-delimited JSON corpus")
      ->required();
  add_resource_options(cv, cv_paths, false);
  cv->add_option("--out", cv_out, "report/model output directory")->required();
  cv->add_option("--k", cv_config.k, "number of folds");
  cv->add_option("--seed", cv_config.seed, "fold assignment and model seed");
  cv->add_option("--tagger-epochs", cv_config.tagger_epochs,
                 "tagger training epochs per fold");
  cv->add_option("--classifier-epochs", cv_config.classifier_epochs,
                 "classifier training epochs per fold");
  cv->add_flag("--no-sentic", cv_no_sentic, "disable the affective channel");
  cv->add_flag("--no-pos", cv_no_pos, "disable the POS channel");
  cv->add_option("--unk-threshold", cv_unk,
                 "rare-word replacement threshold (0 disables)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // anything but --help/--version is usage
  }

  try {
    if (gen->parsed()) {
      return command_gen_corpus(gen_out, gen_sentences, gen_seed, gen_dim);
    }
    if (retro->parsed()) {
      return command_retrofit(retro_embeddings, retro_graph, retro_out,
                              retro_iterations);
    }
    if (tt->parsed()) {
      return command_train_tagger(tt_corpus, tt_paths, tt_out, tt_epochs,
                                  tt_seed,
                                  ChannelConfig{!tt_no_sentic, !tt_no_pos},
                                  tt_unk);
    }
    if (tc->parsed()) {
      return command_train_classifier(
          tc_corpus, tc_paths, tc_out, tc_epochs, tc_seed,
          ChannelConfig{!tc_no_sentic, !tc_no_pos}, tc_unk, tc_clip);
    }
    if (ex->parsed()) {
      return command_extract(ex_input, ex_paths, ex_tagger, ex_classifier,
                             ex_out);
    }
    if (cv->parsed()) {
      cv_config.tagger_channels = ChannelConfig{!cv_no_sentic, !cv_no_pos};
      cv_config.classifier_channels = cv_config.tagger_channels;
      return command_eval_cv(cv_corpus, cv_paths, cv_out, cv_config, cv_unk);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace absa::cli
