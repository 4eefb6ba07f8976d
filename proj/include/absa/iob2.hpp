#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "absa/autodiff.hpp"

namespace absa {

/// IOB2 tag. The enumerator value is the position of the 1 in the tag's
/// 1-of-K vector form, and the order fixes argmax tie-breaking.
enum class Iob2Tag { I = 0, O = 1, B = 2 };

inline constexpr int kIob2TagCount = 3;

ad::Vec tag_onehot(Iob2Tag tag);
char tag_letter(Iob2Tag tag);

enum class Polarity { positive = 0, negative = 1 };

inline constexpr int kPolarityCount = 2;

const char* to_string(Polarity p);
std::optional<Polarity> polarity_from_string(std::string_view s);

/// A half-open aspect-term span in token indices, optionally labeled.
struct AspectSpan {
  int start = 0;
  int end = 0;
  std::optional<Polarity> polarity;

  friend bool operator==(const AspectSpan& a, const AspectSpan& b) {
    return a.start == b.start && a.end == b.end && a.polarity == b.polarity;
  }
};

/// True when no I starts the sequence or follows an O.
bool iob2_valid(const std::vector<Iob2Tag>& tags);

/// Spans to tags: span starts become B, continuations I, everything else O.
/// Spans must lie inside the sentence and not overlap; an overlapping pair
/// raises EncodeError naming both spans.
std::vector<Iob2Tag> iob2_encode(const std::vector<AspectSpan>& spans,
                                 int sentence_len);

/// Tags to spans: maximal B(I)* runs. The sequence must be valid IOB2;
/// otherwise ValidityError reports the first offending index (repair first).
/// Polarities of the returned spans are unset.
std::vector<AspectSpan> iob2_decode(const std::vector<Iob2Tag>& tags);

/// Rewrites every I that starts the sequence or follows an O into a B. The
/// result is always valid; already-valid input comes back unchanged.
std::vector<Iob2Tag> iob2_repair(std::vector<Iob2Tag> tags);

}  // namespace absa
