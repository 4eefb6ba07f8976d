#include "absa/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "absa/embeddings.hpp"
#include "absa/errors.hpp"
#include "absa/textio.hpp"

namespace absa {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_space_char(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string lowercased(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  const int n = static_cast<int>(text.size());
  int i = 0;
  while (i < n) {
    if (is_space_char(text[static_cast<std::size_t>(i)])) {
      ++i;
      continue;
    }
    int begin = i;
    if (is_word_char(text[static_cast<std::size_t>(i)])) {
      while (i < n && is_word_char(text[static_cast<std::size_t>(i)])) ++i;
    } else {
      ++i;  // a single punctuation character
    }
    tokens.push_back(Token{
        lowercased(text.substr(static_cast<std::size_t>(begin),
                               static_cast<std::size_t>(i - begin))),
        begin, i});
  }
  return tokens;
}

namespace {

std::string at_line(const std::string& path, int line_no) {
  return path + ":" + std::to_string(line_no);
}

CorpusRecord parse_record(const json& j, const std::string& path, int line_no,
                          DropCounts& dropped) {
  const std::string where = at_line(path, line_no);
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw FormatError(where + ": record must be an object with a 'text' string");
  }
  CorpusRecord rec;
  rec.text = j["text"].get<std::string>();

  if (j.contains("tokens")) {
    if (!j["tokens"].is_array()) {
      throw FormatError(where + ": 'tokens' must be an array");
    }
    for (const auto& t : j["tokens"]) {
      if (!t.is_object() || !t.contains("text") || !t.contains("begin") ||
          !t.contains("end")) {
        throw FormatError(where + ": token needs 'text', 'begin' and 'end'");
      }
      Token tok;
      tok.text = lowercased(t["text"].get<std::string>());
      tok.begin = t["begin"].get<int>();
      tok.end = t["end"].get<int>();
      if (tok.begin < 0 || tok.end > static_cast<int>(rec.text.size()) ||
          tok.begin >= tok.end) {
        throw FormatError(where + ": token offsets [" +
                          std::to_string(tok.begin) + ", " +
                          std::to_string(tok.end) + ") outside the text");
      }
      if (lowercased(rec.text.substr(
              static_cast<std::size_t>(tok.begin),
              static_cast<std::size_t>(tok.end - tok.begin))) != tok.text) {
        throw FormatError(where + ": token '" + tok.text +
                          "' does not match the text at [" +
                          std::to_string(tok.begin) + ", " +
                          std::to_string(tok.end) + ")");
      }
      rec.tokens.push_back(std::move(tok));
    }
  } else {
    rec.tokens = tokenize(rec.text);
  }

  if (j.contains("pos")) {
    if (!j["pos"].is_array()) {
      throw FormatError(where + ": 'pos' must be an array of strings");
    }
    for (const auto& p : j["pos"]) {
      if (!p.is_string()) {
        throw FormatError(where + ": 'pos' must be an array of strings");
      }
      rec.pos.push_back(p.get<std::string>());
    }
    if (rec.pos.size() != rec.tokens.size()) {
      throw FormatError(where + ": " + std::to_string(rec.pos.size()) +
                        " POS tags for " + std::to_string(rec.tokens.size()) +
                        " tokens");
    }
  } else {
    rec.pos = fallback_pos_tags(rec.tokens);
  }

  if (!j.contains("annotations")) return rec;
  if (!j["annotations"].is_array()) {
    throw FormatError(where + ": 'annotations' must be an array");
  }

  for (const auto& a : j["annotations"]) {
    if (!a.is_object() || !a.contains("begin") || !a.contains("end") ||
        !a.contains("polarity")) {
      throw FormatError(where +
                        ": annotation needs 'begin', 'end' and 'polarity'");
    }
    if (a.contains("aspect") && a["aspect"].is_string() &&
        a["aspect"].get<std::string>() == "NULL") {
      ++dropped.null_aspect;
      continue;
    }
    const auto polarity =
        polarity_from_string(a["polarity"].get<std::string>());
    if (!polarity) {
      ++dropped.polarity_filtered;
      continue;
    }
    const int begin = a["begin"].get<int>();
    const int end = a["end"].get<int>();

    // The span must start and stop exactly on token boundaries.
    int tok_start = -1, tok_end = -1;
    for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
      if (rec.tokens[t].begin == begin) tok_start = static_cast<int>(t);
      if (rec.tokens[t].end == end) tok_end = static_cast<int>(t) + 1;
    }
    if (tok_start < 0 || tok_end <= tok_start) {
      ++dropped.offset_misaligned;
      continue;
    }

    const AspectSpan span{tok_start, tok_end, polarity};
    const CharAnnotation ann{begin, end, *polarity};
    bool skip = false;
    for (std::size_t s = 0; s < rec.spans.size(); ++s) {
      const AspectSpan& other = rec.spans[s];
      if (span.start == other.start && span.end == other.end &&
          span.polarity == other.polarity) {
        ++dropped.duplicate;
        skip = true;
        break;
      }
      const bool same_span =
          span.start == other.start && span.end == other.end;
      if (!same_span && span.start < other.end && other.start < span.end) {
        ++dropped.overlapping;
        skip = true;
        break;
      }
    }
    if (skip) continue;
    rec.spans.push_back(span);
    rec.annotations.push_back(ann);
  }
  return rec;
}

}  // namespace

IngestResult ingest_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  IngestResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(at_line(path, line_no) + ": invalid JSON: " +
                        e.what());
    }
    try {
      result.records.push_back(
          parse_record(j, path, line_no, result.dropped));
    } catch (const json::type_error& e) {
      throw FormatError(at_line(path, line_no) + ": wrong field type: " +
                        e.what());
    }
  }
  return result;
}

void write_corpus(const std::string& path,
                  std::span<const CorpusRecord> records) {
  textio::atomic_write(path, [&](std::ostream& out) {
    for (const CorpusRecord& rec : records) {
      ordered_json j;
      j["text"] = rec.text;
      j["tokens"] = ordered_json::array();
      for (const Token& t : rec.tokens) {
        j["tokens"].push_back(
            {{"text", t.text}, {"begin", t.begin}, {"end", t.end}});
      }
      j["pos"] = rec.pos;
      j["annotations"] = ordered_json::array();
      for (std::size_t i = 0; i < rec.annotations.size(); ++i) {
        const CharAnnotation& a = rec.annotations[i];
        j["annotations"].push_back({{"begin", a.begin},
                                    {"end", a.end},
                                    {"polarity", to_string(a.polarity)}});
      }
      out << j.dump() << '\n';
    }
  });
}

void apply_unk_threshold(std::vector<CorpusRecord>& records, int threshold) {
  if (threshold <= 0) return;
  std::unordered_map<std::string, int> counts;
  for (const CorpusRecord& rec : records) {
    for (const Token& t : rec.tokens) ++counts[t.text];
  }
  for (CorpusRecord& rec : records) {
    for (Token& t : rec.tokens) {
      if (counts[t.text] < threshold) t.text = kUnkToken;
    }
  }
}

std::vector<std::string> fallback_pos_tags(const std::vector<Token>& tokens) {
  static const std::unordered_map<std::string, std::string> lexicon = {
      {"the", "DT"},    {"a", "DT"},      {"an", "DT"},    {"this", "DT"},
      {"and", "CC"},    {"but", "CC"},    {"or", "CC"},
      {"i", "PRP"},     {"we", "PRP"},    {"it", "PRP"},
      {"is", "VBZ"},    {"was", "VBD"},   {"are", "VBP"},  {"were", "VBD"},
      {"be", "VB"},     {"been", "VBN"},  {"had", "VBD"},  {"has", "VBZ"},
      {"loved", "VBD"}, {"hated", "VBD"}, {"found", "VBD"},
      {"thought", "VBD"}, {"not", "RB"},  {"very", "RB"},  {"really", "RB"},
      {"quite", "RB"},  {"here", "RB"},   {"again", "RB"},
      {"of", "IN"},     {"at", "IN"},     {"in", "IN"},    {"with", "IN"},
      {"to", "TO"},
      {",", ","},       {".", "."},       {"!", "."},      {"?", "."},
      {":", ":"},       {";", ":"},       {"'", "POS"},    {"\"", "''"},
      {"(", "("},       {")", ")"},
  };
  static const std::unordered_set<std::string> adjectives = {
      "great",    "excellent", "fantastic", "wonderful", "amazing",
      "superb",   "delicious", "friendly",  "terrible",  "awful",
      "horrible", "bad",       "bland",     "rude",      "slow",
      "overpriced", "disappointing", "mediocre", "tasty", "fresh",
      "stale",    "noisy",     "cozy",      "dirty",     "spotless",
      "sharp",    "marginal",  "crisp",     "sluggish",  "flimsy",
      "sturdy",   "generous",  "stingy",
  };
  std::vector<std::string> tags;
  tags.reserve(tokens.size());
  for (const Token& t : tokens) {
    const std::string& w = t.text;
    if (auto it = lexicon.find(w); it != lexicon.end()) {
      tags.push_back(it->second);
    } else if (adjectives.count(w)) {
      tags.push_back("JJ");
    } else if (w.size() > 3 && w.ends_with("ly")) {
      tags.push_back("RB");
    } else if (w.size() > 4 && w.ends_with("ing")) {
      tags.push_back("VBG");
    } else if (w.size() > 3 && w.ends_with("ed")) {
      tags.push_back("VBD");
    } else if (!w.empty() &&
               std::isdigit(static_cast<unsigned char>(w[0]))) {
      tags.push_back("CD");
    } else if (w.size() > 3 && w.ends_with("s") && !w.ends_with("ss")) {
      tags.push_back("NNS");
    } else {
      tags.push_back("NN");
    }
  }
  return tags;
}

}  // namespace absa
