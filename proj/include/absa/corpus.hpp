#pragma once

#include <span>
#include <string>
#include <vector>

#include "absa/iob2.hpp"

namespace absa {

/// A token with its half-open character range in the original sentence.
/// Token text is lowercased; offsets refer to the text as written.
struct Token {
  std::string text;
  int begin = 0;
  int end = 0;
};

/// Lowercasing tokenizer. Tokens are the matches of
///   [A-Za-z0-9]+|[^A-Za-z0-9\s]
/// i.e. maximal alphanumeric runs plus every other non-space character as
/// its own token, so punctuation is kept.
std::vector<Token> tokenize(const std::string& text);

/// An aspect annotation in character offsets, as read from the corpus file.
struct CharAnnotation {
  int begin = 0;
  int end = 0;
  Polarity polarity = Polarity::positive;
};

struct CorpusRecord {
  std::string text;
  std::vector<Token> tokens;
  std::vector<std::string> pos;          // aligned with tokens
  std::vector<AspectSpan> spans;         // token spans, polarity set
  std::vector<CharAnnotation> annotations;  // aligned 1:1 with spans
};

/// Why annotations were dropped at ingestion. Nothing is lost silently;
/// these counts are part of every ingestion result.
struct DropCounts {
  int null_aspect = 0;
  int polarity_filtered = 0;
  int offset_misaligned = 0;
  int overlapping = 0;
  int duplicate = 0;

  int total() const {
    return null_aspect + polarity_filtered + offset_misaligned + overlapping +
           duplicate;
  }
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  DropCounts dropped;
};

/// Reads a line-delimited JSON corpus. Each line is an object:
///
///   {"text": "...",
///    "tokens": [{"text": "...", "begin": 0, "end": 3}, ...],   (optional)
///    "pos": ["DT", "NN", ...],                                 (optional)
///    "annotations": [{"begin": 4, "end": 11,
///                     "polarity": "positive", "aspect": "..."}]}
///
/// Absent tokens are produced by the tokenizer; absent POS tags by the
/// fallback tagger. Annotations are mapped to token spans; the ones that are
/// unmappable or out of scope are dropped and counted: aspect "NULL",
/// polarities outside positive/negative, offsets off token boundaries,
/// overlaps with an earlier annotation, and exact duplicates. Schema
/// violations raise FormatError with the line number.
IngestResult ingest_corpus(const std::string& path);

/// Serializes records back to the same line-delimited format.
void write_corpus(const std::string& path,
                  std::span<const CorpusRecord> records);

/// Replaces tokens that appear fewer than `threshold` times across the
/// records with the placeholder token, mirroring the rare-word handling of
/// the embedding vocabulary. A threshold of 0 disables the replacement.
/// Character offsets are untouched.
void apply_unk_threshold(std::vector<CorpusRecord>& records, int threshold);

/// Rule-based POS tagger covering the synthetic corpus vocabulary: closed
/// word lists plus a few suffix rules, defaulting to NN. Not a real tagger;
/// real corpora should carry their own tags.
std::vector<std::string> fallback_pos_tags(const std::vector<Token>& tokens);

}  // namespace absa
