#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absa/autodiff.hpp"

namespace absa {

using ad::Mat;
using ad::Vec;

inline constexpr const char* kUnkToken = "<UNK>";

/// Word list with a dense id space and a reserved placeholder token for
/// out-of-vocabulary words.
class Vocabulary {
 public:
  /// Adds a word, returning its id; duplicates raise ContractError.
  int add(const std::string& word);
  std::optional<int> find(const std::string& word) const;
  bool contains(const std::string& word) const { return find(word).has_value(); }
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(words_.size()); }
  int unk_id() const;
  bool has_unk() const { return unk_id_ >= 0; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  int unk_id_ = -1;
};

struct EmbeddingTable {
  Eigen::Index dim = 0;
  Mat rows;  // one row per vocabulary id
};

struct WordVectors {
  Vocabulary vocab;
  EmbeddingTable table;
};

/// Reads "word v1 … vdim" lines. The dimension is fixed by the first line;
/// shorter or longer lines raise FormatError naming the line, as do empty
/// files and duplicate words. When the file carries no placeholder token it
/// is appended with the mean of all loaded vectors, so lookups stay total.
WordVectors load_embeddings(const std::string& path);

/// Writes the same format back; save → load reproduces vocab and vectors
/// exactly.
void save_embeddings(const std::string& path, const WordVectors& wv);

/// The word's vector, or the placeholder vector for unknown words. Total.
Vec lookup(const WordVectors& wv, const std::string& token);

/// The k nearest words by Euclidean distance, excluding the query itself;
/// ties resolve by ascending vocabulary id. The query must be in the
/// vocabulary (LookupError) and k must be < |V| (ContractError).
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const WordVectors& wv, const std::string& word, int k);

}  // namespace absa
