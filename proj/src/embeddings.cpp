#include "absa/embeddings.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "absa/errors.hpp"
#include "absa/textio.hpp"

namespace absa {

int Vocabulary::add(const std::string& word) {
  if (index_.count(word)) {
    throw ContractError("Vocabulary::add: duplicate word '" + word + "'");
  }
  const int id = static_cast<int>(words_.size());
  words_.push_back(word);
  index_.emplace(word, id);
  if (word == kUnkToken) unk_id_ = id;
  return id;
}

std::optional<int> Vocabulary::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::unk_id() const {
  if (unk_id_ < 0) {
    throw StateError("Vocabulary: placeholder token missing");
  }
  return unk_id_;
}

WordVectors load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::vector<std::vector<double>> vectors;
  Eigen::Index dim = -1;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream s(line);
    std::string word;
    s >> word;
    std::vector<double> values;
    std::string tok;
    while (s >> tok) {
      values.push_back(
          textio::parse_double(tok, path + ":" + std::to_string(line_no)));
    }
    if (dim < 0) {
      if (values.empty()) {
        throw FormatError(path + ":" + std::to_string(line_no) +
                          ": word '" + word + "' has no vector values");
      }
      dim = static_cast<Eigen::Index>(values.size());
    } else if (static_cast<Eigen::Index>(values.size()) != dim) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": word '" +
                        word + "' has " + std::to_string(values.size()) +
                        " values, expected " + std::to_string(dim));
    }
    if (!seen.insert(word).second) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": duplicate word '" + word + "'");
    }
    words.push_back(word);
    vectors.push_back(std::move(values));
  }
  if (words.empty()) {
    throw FormatError(path + ": no word vectors found");
  }

  WordVectors wv;
  const bool need_unk = !seen.count(kUnkToken);
  const Eigen::Index count =
      static_cast<Eigen::Index>(words.size()) + (need_unk ? 1 : 0);
  wv.table.dim = dim;
  wv.table.rows = Mat::Zero(count, dim);
  for (std::size_t i = 0; i < words.size(); ++i) {
    wv.vocab.add(words[i]);
    for (Eigen::Index j = 0; j < dim; ++j) {
      wv.table.rows(static_cast<Eigen::Index>(i), j) = vectors[i][j];
    }
  }
  if (need_unk) {
    const int id = wv.vocab.add(kUnkToken);
    wv.table.rows.row(id) =
        wv.table.rows.topRows(static_cast<Eigen::Index>(words.size()))
            .colwise()
            .mean();
  }
  return wv;
}

void save_embeddings(const std::string& path, const WordVectors& wv) {
  textio::atomic_write(path, [&](std::ostream& out) {
    for (int i = 0; i < wv.vocab.size(); ++i) {
      out << wv.vocab.word(i);
      for (Eigen::Index j = 0; j < wv.table.dim; ++j) {
        out << ' ' << textio::format_double(wv.table.rows(i, j));
      }
      out << '\n';
    }
  });
}

Vec lookup(const WordVectors& wv, const std::string& token) {
  const int id = wv.vocab.find(token).value_or(wv.vocab.unk_id());
  return wv.table.rows.row(id).transpose();
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const WordVectors& wv, const std::string& word, int k) {
  const auto query = wv.vocab.find(word);
  if (!query) {
    throw LookupError("nearest_neighbors: '" + word + "' not in vocabulary");
  }
  if (k <= 0 || k >= wv.vocab.size()) {
    throw ContractError("nearest_neighbors: k = " + std::to_string(k) +
                        " must be in [1, |V|)");
  }
  std::vector<std::pair<double, int>> scored;
  scored.reserve(static_cast<std::size_t>(wv.vocab.size()) - 1);
  const Vec q = wv.table.rows.row(*query).transpose();
  for (int i = 0; i < wv.vocab.size(); ++i) {
    if (i == *query) continue;
    const double d = (wv.table.rows.row(i).transpose() - q).norm();
    scored.emplace_back(d, i);
  }
  std::partial_sort(scored.begin(), scored.begin() + k, scored.end());
  std::vector<std::pair<std::string, double>> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.emplace_back(wv.vocab.word(scored[static_cast<std::size_t>(i)].second),
                     scored[static_cast<std::size_t>(i)].first);
  }
  return out;
}

}  // namespace absa
