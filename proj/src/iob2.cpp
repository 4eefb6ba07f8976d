#include "absa/iob2.hpp"

#include <algorithm>
#include <string>

#include "absa/errors.hpp"

namespace absa {

ad::Vec tag_onehot(Iob2Tag tag) {
  ad::Vec v = ad::Vec::Zero(kIob2TagCount);
  v[static_cast<int>(tag)] = 1.0;
  return v;
}

char tag_letter(Iob2Tag tag) {
  switch (tag) {
    case Iob2Tag::I: return 'I';
    case Iob2Tag::O: return 'O';
    case Iob2Tag::B: return 'B';
  }
  return '?';
}

const char* to_string(Polarity p) {
  return p == Polarity::positive ? "positive" : "negative";
}

std::optional<Polarity> polarity_from_string(std::string_view s) {
  if (s == "positive") return Polarity::positive;
  if (s == "negative") return Polarity::negative;
  return std::nullopt;
}

bool iob2_valid(const std::vector<Iob2Tag>& tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == Iob2Tag::I &&
        (i == 0 || tags[i - 1] == Iob2Tag::O)) {
      return false;
    }
  }
  return true;
}

std::vector<Iob2Tag> iob2_encode(const std::vector<AspectSpan>& spans,
                                 int sentence_len) {
  auto describe = [](const AspectSpan& s) {
    return "[" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")";
  };
  std::vector<AspectSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const AspectSpan& a, const AspectSpan& b) {
              return a.start < b.start;
            });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const AspectSpan& s = sorted[i];
    if (s.start < 0 || s.start >= s.end || s.end > sentence_len) {
      throw SpanError("iob2_encode: span " + describe(s) +
                      " invalid for sentence of length " +
                      std::to_string(sentence_len));
    }
    if (i > 0 && sorted[i - 1].end > s.start) {
      throw EncodeError("iob2_encode: spans " + describe(sorted[i - 1]) +
                        " and " + describe(s) + " overlap");
    }
  }
  std::vector<Iob2Tag> tags(static_cast<std::size_t>(sentence_len),
                            Iob2Tag::O);
  for (const AspectSpan& s : sorted) {
    tags[static_cast<std::size_t>(s.start)] = Iob2Tag::B;
    for (int t = s.start + 1; t < s.end; ++t) {
      tags[static_cast<std::size_t>(t)] = Iob2Tag::I;
    }
  }
  return tags;
}

std::vector<AspectSpan> iob2_decode(const std::vector<Iob2Tag>& tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == Iob2Tag::I && (i == 0 || tags[i - 1] == Iob2Tag::O)) {
      throw ValidityError("iob2_decode: stray I at index " +
                          std::to_string(i) + "; repair the sequence first");
    }
  }
  std::vector<AspectSpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] != Iob2Tag::B) continue;
    std::size_t end = i + 1;
    while (end < tags.size() && tags[end] == Iob2Tag::I) ++end;
    spans.push_back(
        AspectSpan{static_cast<int>(i), static_cast<int>(end), std::nullopt});
    i = end - 1;
  }
  return spans;
}

std::vector<Iob2Tag> iob2_repair(std::vector<Iob2Tag> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == Iob2Tag::I && (i == 0 || tags[i - 1] == Iob2Tag::O)) {
      tags[i] = Iob2Tag::B;
    }
  }
  return tags;
}

}  // namespace absa
