#include "absa/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "absa/errors.hpp"
#include "absa/textio.hpp"

namespace absa {

SenticLexicon SenticLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  SenticLexicon lex;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::string word;
    if (!(s >> word)) continue;
    if (word.find('_') != std::string::npos) {
      ++lex.skipped_multiword_;
      continue;
    }
    Vec values(kDim);
    std::string tok;
    for (int i = 0; i < kDim; ++i) {
      if (!(s >> tok)) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": word '" +
                          word + "' has fewer than " + std::to_string(kDim) +
                          " scores");
      }
      values[i] =
          textio::parse_double(tok, path + ":" + std::to_string(line_no));
    }
    if (s >> tok) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": word '" +
                        word + "' has more than " + std::to_string(kDim) +
                        " scores");
    }
    lex.entries_[word] = std::move(values);
  }
  return lex;
}

void SenticLexicon::insert(const std::string& word, const Vec& values) {
  if (values.size() != kDim) {
    throw ShapeError("SenticLexicon::insert: vector for '" + word +
                     "' has length " + std::to_string(values.size()));
  }
  if (word.find('_') != std::string::npos) {
    throw ContractError("SenticLexicon::insert: multi-word key '" + word +
                        "'");
  }
  entries_[word] = values;
}

Vec SenticLexicon::lookup(const std::string& token) const {
  auto it = entries_.find(token);
  if (it == entries_.end()) return Vec::Zero(kDim);
  return it->second;
}

PosTagSet::PosTagSet(std::vector<std::string> tags) : tags_(std::move(tags)) {
  if (tags_.empty()) throw ContractError("PosTagSet: empty tag list");
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (!index_.emplace(tags_[i], static_cast<int>(i)).second) {
      throw ContractError("PosTagSet: duplicate tag '" + tags_[i] + "'");
    }
  }
}

PosTagSet PosTagSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> tags;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    tags.push_back(line);
  }
  return PosTagSet(std::move(tags));
}

int PosTagSet::index(const std::string& tag) const {
  auto it = index_.find(tag);
  if (it == index_.end()) {
    throw TagError("unknown POS tag '" + tag + "'");
  }
  return it->second;
}

Vec PosTagSet::onehot(const std::string& tag) const {
  Vec v = Vec::Zero(size());
  v[index(tag)] = 1.0;
  return v;
}

DistanceEmbeddingTable::DistanceEmbeddingTable(int radius)
    : clip_radius(radius),
      table("distance.table", 2 * static_cast<Eigen::Index>(radius) + 1,
            kDim) {
  if (radius <= 0) {
    throw ContractError("DistanceEmbeddingTable: clip radius must be positive");
  }
}

void DistanceEmbeddingTable::init(nn::Rng& rng) {
  nn::glorot_fill(table, table.rows(), kDim, rng);
}

Eigen::Index DistanceEmbeddingTable::row_for_offset(int offset) const {
  const int clamped = std::clamp(offset, -clip_radius, clip_radius);
  return static_cast<Eigen::Index>(clamped + clip_radius);
}

std::vector<int> distance_tags(int sentence_len, int span_start,
                               int span_end) {
  if (span_start < 0 || span_start >= span_end || span_end > sentence_len) {
    throw SpanError("distance_tags: span [" + std::to_string(span_start) +
                    ", " + std::to_string(span_end) +
                    ") invalid for sentence of length " +
                    std::to_string(sentence_len));
  }
  std::vector<int> tags(static_cast<std::size_t>(sentence_len));
  for (int i = 0; i < sentence_len; ++i) {
    if (i < span_start) {
      tags[static_cast<std::size_t>(i)] = i - span_start;
    } else if (i >= span_end) {
      tags[static_cast<std::size_t>(i)] = i - (span_end - 1);
    } else {
      tags[static_cast<std::size_t>(i)] = 0;
    }
  }
  return tags;
}

std::vector<Vec> fuse(const std::vector<const std::vector<Vec>*>& channels) {
  if (channels.empty()) {
    throw ContractError("fuse: at least one channel required");
  }
  const std::size_t tokens = channels.front()->size();
  for (std::size_t c = 1; c < channels.size(); ++c) {
    if (channels[c]->size() != tokens) {
      throw AlignmentError("fuse: channel " + std::to_string(c) + " has " +
                           std::to_string(channels[c]->size()) +
                           " tokens, expected " + std::to_string(tokens));
    }
  }
  std::vector<Vec> fused;
  fused.reserve(tokens);
  for (std::size_t t = 0; t < tokens; ++t) {
    Eigen::Index dim = 0;
    for (const auto* ch : channels) dim += (*ch)[t].size();
    Vec v(dim);
    Eigen::Index at = 0;
    for (const auto* ch : channels) {
      v.segment(at, (*ch)[t].size()) = (*ch)[t];
      at += (*ch)[t].size();
    }
    fused.push_back(std::move(v));
  }
  return fused;
}

}  // namespace absa
