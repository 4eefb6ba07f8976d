#include <doctest.h>

#include "absa/iob2.hpp"
#include "absa/nn.hpp"
#include "test_util.hpp"

using namespace absa;
using T = Iob2Tag;

namespace {

// Brute-force validity: no I at the start, no I right after an O.
bool valid_oracle(const std::vector<T>& tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] != T::I) continue;
    if (i == 0) return false;
    if (tags[i - 1] == T::O) return false;
  }
  return true;
}

std::vector<AspectSpan> random_spans(nn::Rng& rng, int len) {
  std::vector<AspectSpan> spans;
  int at = 0;
  while (at < len) {
    const int gap = static_cast<int>(rng.index(3));
    at += gap;
    if (at >= len) break;
    const int width =
        1 + static_cast<int>(rng.index(static_cast<std::size_t>(
                std::min(3, len - at))));
    spans.push_back(AspectSpan{at, at + width, std::nullopt});
    at += width;
  }
  return spans;
}

}  // namespace

TEST_SUITE("iob2-codec") {

TEST_CASE("tag vectors are 1-of-K at the documented indices") {
  CHECK(tag_onehot(T::I)[0] == 1.0);
  CHECK(tag_onehot(T::O)[1] == 1.0);
  CHECK(tag_onehot(T::B)[2] == 1.0);
  for (T t : {T::I, T::O, T::B}) CHECK(tag_onehot(t).sum() == 1.0);
}

TEST_CASE("encoding the two-token aspect sentence") {
  // "The sake menu should not be overlooked !" with the aspect at [1, 3)
  auto tags = iob2_encode({AspectSpan{1, 3, std::nullopt}}, 8);
  CHECK(tags == std::vector<T>{T::O, T::B, T::I, T::O, T::O, T::O, T::O,
                               T::O});
}

TEST_CASE("no spans encode to all O") {
  auto tags = iob2_encode({}, 4);
  CHECK(tags == std::vector<T>{T::O, T::O, T::O, T::O});
}

TEST_CASE("adjacent spans stay separate through B") {
  auto tags = iob2_encode(
      {AspectSpan{0, 1, std::nullopt}, AspectSpan{1, 3, std::nullopt}}, 3);
  CHECK(tags == std::vector<T>{T::B, T::B, T::I});
}

TEST_CASE("overlapping spans are an encoding error naming the pair") {
  try {
    iob2_encode(
        {AspectSpan{0, 2, std::nullopt}, AspectSpan{1, 3, std::nullopt}}, 4);
    FAIL("expected EncodeError");
  } catch (const EncodeError& e) {
    const std::string what = e.what();
    CHECK(what.find("[0, 2)") != std::string::npos);
    CHECK(what.find("[1, 3)") != std::string::npos);
  }
  CHECK_THROWS_AS(iob2_encode({AspectSpan{2, 2, std::nullopt}}, 4),
                  SpanError);
}

TEST_CASE("decoding the example sentence recovers the span") {
  auto spans =
      iob2_decode({T::O, T::B, T::I, T::O, T::O, T::O, T::O, T::O});
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start == 1);
  CHECK(spans[0].end == 3);
}

TEST_CASE("all O decodes to no spans") {
  CHECK(iob2_decode({T::O, T::O, T::O}).empty());
}

TEST_CASE("back-to-back runs decode to separate spans") {
  auto spans = iob2_decode({T::B, T::I, T::I, T::B});
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == AspectSpan{0, 3, std::nullopt});
  CHECK(spans[1] == AspectSpan{3, 4, std::nullopt});
}

TEST_CASE("decoding an invalid sequence reports the first bad index") {
  try {
    iob2_decode({T::O, T::I, T::I});
    FAIL("expected ValidityError");
  } catch (const ValidityError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
  CHECK_THROWS_AS(iob2_decode({T::I}), ValidityError);
}

TEST_CASE("repair rewrites I after O") {
  CHECK(iob2_repair({T::O, T::I, T::I}) == std::vector<T>{T::O, T::B, T::I});
}

TEST_CASE("repair rewrites a sequence-initial I too") {
  CHECK(iob2_repair({T::I, T::O, T::I}) == std::vector<T>{T::B, T::O, T::B});
}

TEST_CASE("repair leaves valid sequences unchanged") {
  const std::vector<T> valid{T::B, T::I, T::O};
  CHECK(iob2_repair(valid) == valid);
}

TEST_CASE("encode/decode round-trip over random span sets") {
  nn::Rng rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng.index(20));
    const std::vector<AspectSpan> spans = random_spans(rng, len);
    const std::vector<T> tags = iob2_encode(spans, len);
    CHECK(iob2_decode(tags) == spans);
  }
}

TEST_CASE("exhaustive repair validity and idempotence up to length 8") {
  for (int len = 0; len <= 8; ++len) {
    long total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
      std::vector<T> tags(static_cast<std::size_t>(len));
      long rest = code;
      for (int i = 0; i < len; ++i) {
        tags[static_cast<std::size_t>(i)] = static_cast<T>(rest % 3);
        rest /= 3;
      }
      const std::vector<T> repaired = iob2_repair(tags);
      REQUIRE(valid_oracle(repaired));
      REQUIRE(iob2_repair(repaired) == repaired);
      if (valid_oracle(tags)) REQUIRE(repaired == tags);
      REQUIRE(iob2_valid(tags) == valid_oracle(tags));
    }
  }
}

}  // TEST_SUITE
