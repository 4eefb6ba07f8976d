#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "absa/autodiff.hpp"
#include "absa/nn.hpp"

namespace absa {

using ad::Vec;

/// Affective scores per word, ordered (pleasantness, attention, sensitivity,
/// aptitude, polarity). Unknown words resolve to the zero vector.
class SenticLexicon {
 public:
  static constexpr int kDim = 5;

  /// Reads tab-separated "word<TAB>v1..v5" lines. Multi-word keys (anything
  /// containing '_') are skipped; the engine works on single words only.
  static SenticLexicon load(const std::string& path);

  void insert(const std::string& word, const Vec& values);
  Vec lookup(const std::string& token) const;
  bool contains(const std::string& token) const { return entries_.count(token) > 0; }
  std::size_t size() const { return entries_.size(); }
  std::size_t skipped_multiword() const { return skipped_multiword_; }

 private:
  std::unordered_map<std::string, Vec> entries_;
  std::size_t skipped_multiword_ = 0;
};

/// Ordered POS tag inventory; tags map to 1-of-K vectors.
class PosTagSet {
 public:
  explicit PosTagSet(std::vector<std::string> tags);
  static PosTagSet load(const std::string& path);  // one tag per line

  int size() const { return static_cast<int>(tags_.size()); }
  const std::vector<std::string>& tags() const { return tags_; }
  /// Index of a tag; unknown tags raise TagError naming the tag.
  int index(const std::string& tag) const;
  Vec onehot(const std::string& tag) const;

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> index_;
};

/// Learnable vectors over clamped signed token offsets. Offsets beyond
/// ±clip_radius use the boundary rows.
struct DistanceEmbeddingTable {
  static constexpr int kDim = 10;
  int clip_radius;
  ad::Param table;  // (2·clip_radius + 1) × kDim

  explicit DistanceEmbeddingTable(int clip_radius = 30);
  void init(nn::Rng& rng);
  Eigen::Index row_for_offset(int offset) const;
};

/// Signed distance of every token to the aspect span [start, end): tokens
/// inside get 0, tokens before get negative offsets counted from the span
/// start, tokens after positive offsets counted from the last span token.
/// Invalid spans raise SpanError.
std::vector<int> distance_tags(int sentence_len, int span_start, int span_end);

/// Per-token concatenation of the given channels, in the order given.
/// Channels must agree on token count (AlignmentError) and at least one
/// channel is required (ContractError).
std::vector<Vec> fuse(const std::vector<const std::vector<Vec>*>& channels);

}  // namespace absa
