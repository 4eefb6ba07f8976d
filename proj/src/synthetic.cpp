#include "absa/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace absa::synth {

namespace {

const std::vector<std::string> kPositive = {"great", "excellent", "fantastic",
                                            "delicious", "friendly"};
const std::vector<std::string> kNegative = {"terrible", "awful", "bland",
                                            "rude", "overpriced"};
const std::vector<std::string> kAspects = {
    "service",      "food",           "pizza",      "staff",
    "dessert",      "atmosphere",     "battery life", "wine selection"};

// {A}/{B}: first/second aspect slot, {J}/{K}: their polar words.
const std::vector<std::vector<std::string>> kTemplates = {
    {"the", "{A}", "was", "{J}", "."},
    {"{J}", "{A}", "!"},
    {"i", "loved", "the", "{A}", "."},
    {"i", "hated", "the", "{A}", "."},
    {"the", "{A}", "was", "{J}", "but", "the", "{B}", "was", "{K}", "."},
    {"{J}", "{A}", ",", "{K}", "{B}", "."},
    {"the", "{A}", "at", "this", "place", "was", "really", "{J}", "."},
    {"we", "found", "the", "{A}", "quite", "{J}", "."},
    {"the", "{A}", "was", "{J}", "and", "the", "{B}", "was", "{K}", "."},
};

bool is_punct(const std::string& w) {
  return w.size() == 1 && !std::isalnum(static_cast<unsigned char>(w[0]));
}

/// Cycles through a shuffled copy of `items`, reshuffling after each pass.
class Schedule {
 public:
  Schedule(std::vector<int> items, nn::Rng& rng)
      : items_(std::move(items)), rng_(&rng) {
    rng_->shuffle(items_);
  }
  int next() {
    if (at_ == items_.size()) {
      rng_->shuffle(items_);
      at_ = 0;
    }
    return items_[at_++];
  }

 private:
  std::vector<int> items_;
  std::size_t at_ = 0;
  nn::Rng* rng_;
};

std::vector<int> iota_vec(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

struct BuiltSentence {
  std::string text;
  std::vector<CharAnnotation> annotations;
};

BuiltSentence build_sentence(const std::vector<std::string>& tmpl,
                             const std::string& aspect_a, Polarity pol_a,
                             const std::string& adj_a,
                             const std::string& aspect_b, Polarity pol_b,
                             const std::string& adj_b) {
  BuiltSentence out;
  int begin_a = -1, end_a = -1, begin_b = -1, end_b = -1;
  for (const std::string& slot : tmpl) {
    std::string word;
    bool track_a = false, track_b = false;
    if (slot == "{A}") {
      word = aspect_a;
      track_a = true;
    } else if (slot == "{B}") {
      word = aspect_b;
      track_b = true;
    } else if (slot == "{J}") {
      word = adj_a;
    } else if (slot == "{K}") {
      word = adj_b;
    } else {
      word = slot;
    }
    if (!out.text.empty() && !is_punct(word)) out.text += ' ';
    if (track_a) begin_a = static_cast<int>(out.text.size());
    if (track_b) begin_b = static_cast<int>(out.text.size());
    out.text += word;
    if (track_a) end_a = static_cast<int>(out.text.size());
    if (track_b) end_b = static_cast<int>(out.text.size());
  }
  if (!out.text.empty()) {
    out.text[0] =
        static_cast<char>(std::toupper(static_cast<unsigned char>(out.text[0])));
  }
  out.annotations.push_back(CharAnnotation{begin_a, end_a, pol_a});
  if (begin_b >= 0) {
    out.annotations.push_back(CharAnnotation{begin_b, end_b, pol_b});
  }
  return out;
}

CorpusRecord to_record(const BuiltSentence& built) {
  CorpusRecord rec;
  rec.text = built.text;
  rec.tokens = tokenize(rec.text);
  rec.pos = fallback_pos_tags(rec.tokens);
  for (const CharAnnotation& a : built.annotations) {
    int tok_start = -1, tok_end = -1;
    for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
      if (rec.tokens[t].begin == a.begin) tok_start = static_cast<int>(t);
      if (rec.tokens[t].end == a.end) tok_end = static_cast<int>(t) + 1;
    }
    if (tok_start < 0 || tok_end <= tok_start) {
      throw ContractError("synth: aspect offsets do not line up with tokens "
                          "in '" + rec.text + "'");
    }
    rec.spans.push_back(AspectSpan{tok_start, tok_end, a.polarity});
    rec.annotations.push_back(a);
  }
  return rec;
}

}  // namespace

PosTagSet penn_treebank_tagset() {
  return PosTagSet({
      "CC",  "CD",  "DT",   "EX",   "FW",  "IN",  "JJ",  "JJR", "JJS",
      "LS",  "MD",  "NN",   "NNS",  "NNP", "NNPS", "PDT", "POS", "PRP",
      "PRP$", "RB", "RBR",  "RBS",  "RP",  "SYM", "TO",  "UH",  "VB",
      "VBD", "VBG", "VBN",  "VBP",  "VBZ", "WDT", "WP",  "WP$", "WRB",
      "#",   "$",   "''",   "(",    ")",   ",",   ".",   ":",   "``",
  });
}

Dataset generate(const Options& options) {
  if (options.sentences <= 0) {
    throw ContractError("synth::generate: sentence count must be positive");
  }
  if (options.embedding_dim <= 0) {
    throw ContractError("synth::generate: embedding dim must be positive");
  }
  nn::Rng rng(options.seed);
  Schedule templates(iota_vec(static_cast<int>(kTemplates.size())), rng);
  Schedule aspects(iota_vec(static_cast<int>(kAspects.size())), rng);
  Schedule positives(iota_vec(static_cast<int>(kPositive.size())), rng);
  Schedule negatives(iota_vec(static_cast<int>(kNegative.size())), rng);
  bool next_positive = true;

  std::vector<CorpusRecord> records;
  records.reserve(static_cast<std::size_t>(options.sentences));
  for (int s = 0; s < options.sentences; ++s) {
    const auto& tmpl = kTemplates[static_cast<std::size_t>(templates.next())];
    const bool two_aspects =
        std::find(tmpl.begin(), tmpl.end(), "{B}") != tmpl.end();
    const bool fixed_positive =
        std::find(tmpl.begin(), tmpl.end(), "loved") != tmpl.end();
    const bool fixed_negative =
        std::find(tmpl.begin(), tmpl.end(), "hated") != tmpl.end();

    // Forced templates must not consume an alternation turn, or the
    // adjective classes drift out of balance.
    Polarity pol_a;
    if (fixed_positive) {
      pol_a = Polarity::positive;
    } else if (fixed_negative) {
      pol_a = Polarity::negative;
    } else {
      pol_a = next_positive ? Polarity::positive : Polarity::negative;
      next_positive = !next_positive;
    }

    const std::string aspect_a =
        kAspects[static_cast<std::size_t>(aspects.next())];
    const bool uses_adjective =
        std::find(tmpl.begin(), tmpl.end(), "{J}") != tmpl.end();
    const std::string adj_a =
        !uses_adjective ? std::string()
        : pol_a == Polarity::positive
            ? kPositive[static_cast<std::size_t>(positives.next())]
            : kNegative[static_cast<std::size_t>(negatives.next())];

    std::string aspect_b, adj_b;
    Polarity pol_b = pol_a == Polarity::positive ? Polarity::negative
                                                 : Polarity::positive;
    if (two_aspects) {
      do {
        aspect_b = kAspects[static_cast<std::size_t>(aspects.next())];
      } while (aspect_b == aspect_a);
      adj_b = pol_b == Polarity::positive
                  ? kPositive[static_cast<std::size_t>(positives.next())]
                  : kNegative[static_cast<std::size_t>(negatives.next())];
    }

    records.push_back(to_record(
        build_sentence(tmpl, aspect_a, pol_a, adj_a, aspect_b, pol_b, adj_b)));
  }

  // Word vectors: seeded noise over the corpus vocabulary, placeholder last.
  std::set<std::string> vocab_words;
  for (const CorpusRecord& rec : records) {
    for (const Token& t : rec.tokens) vocab_words.insert(t.text);
  }
  WordVectors wv;
  wv.table.dim = options.embedding_dim;
  wv.table.rows = Mat::Zero(static_cast<Eigen::Index>(vocab_words.size()) + 1,
                            options.embedding_dim);
  for (const std::string& w : vocab_words) {
    const int id = wv.vocab.add(w);
    for (Eigen::Index j = 0; j < options.embedding_dim; ++j) {
      wv.table.rows(id, j) = rng.uniform(-0.5, 0.5);
    }
  }
  const int unk = wv.vocab.add(kUnkToken);
  wv.table.rows.row(unk) =
      wv.table.rows.topRows(unk).colwise().mean();

  // The affective lexicon carries the polarity signal: ±1 in the last slot
  // for polar words, small noise elsewhere.
  SenticLexicon sentic;
  auto add_sentic = [&](const std::string& word, double polarity) {
    Vec v(SenticLexicon::kDim);
    for (int i = 0; i < SenticLexicon::kDim - 1; ++i) {
      v[i] = rng.uniform(-0.2, 0.2);
    }
    v[SenticLexicon::kDim - 1] = polarity;
    sentic.insert(word, v);
  };
  for (const std::string& w : kPositive) add_sentic(w, 1.0);
  for (const std::string& w : kNegative) add_sentic(w, -1.0);
  add_sentic("loved", 1.0);
  add_sentic("hated", -1.0);

  auto synonym_line = [](const std::vector<std::string>& words) {
    std::string line;
    for (const std::string& w : words) {
      if (!line.empty()) line += ' ';
      line += w;
    }
    return line;
  };

  return Dataset{
      std::move(records),
      FeatureResources{std::move(wv), std::move(sentic),
                       penn_treebank_tagset()},
      {synonym_line(kPositive), synonym_line(kNegative)}};
}

}  // namespace absa::synth
