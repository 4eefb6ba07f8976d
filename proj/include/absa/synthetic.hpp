#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "absa/models.hpp"

namespace absa::synth {

/// Controls for the templated review generator. Template, aspect and
/// adjective choices cycle through shuffled schedules so word counts stay
/// balanced; everything is deterministic for a given seed.
struct Options {
  int sentences = 100;
  std::uint64_t seed = 7;
  Eigen::Index embedding_dim = 100;
};

struct Dataset {
  std::vector<CorpusRecord> records;
  FeatureResources resources;
  // Synonym lines ("word neighbor ...") linking adjectives of the same
  // polarity, for retrofitting runs.
  std::vector<std::string> synonym_lines;
};

/// Generates labeled review sentences from templates. Every aspect span
/// carries a polarity decided by the polar word that modifies it; the
/// affective lexicon marks those polar words (±1 in the polarity slot), and
/// the word vectors are seeded uniform noise.
Dataset generate(const Options& options);

/// The standard 45-tag Penn Treebank inventory.
PosTagSet penn_treebank_tagset();

}  // namespace absa::synth
