#include <doctest.h>

#include <fstream>

#include "absa/nn.hpp"
#include "absa/param_store.hpp"
#include "absa/textio.hpp"
#include "test_util.hpp"

using namespace absa;
using ad::Param;

TEST_SUITE("param-store") {

TEST_CASE("save and load round-trip parameters exactly") {
  test::TempDir dir("params");
  nn::Rng rng(42);
  Param a("layer.w", 3, 5), b("layer.b", 3, 1);
  nn::glorot_fill(a, 5, 3, rng);
  nn::glorot_fill(b, 1, 3, rng);
  // awkward values that need full precision
  a.value(0, 0) = 1.0 / 3.0;
  a.value(1, 1) = 1e-300;
  a.value(2, 2) = -0.1;
  b.value(0, 0) = 3.141592653589793;

  std::vector<Param*> params{&a, &b};
  nn::save_params(dir.file("m.params"), params);

  Param a2("layer.w", 3, 5), b2("layer.b", 3, 1);
  std::vector<Param*> loaded{&a2, &b2};
  nn::load_params(dir.file("m.params"), loaded);
  CHECK(a2.value == a.value);
  CHECK(b2.value == b.value);
}

TEST_CASE("saving twice produces identical bytes") {
  test::TempDir dir("params_bytes");
  nn::Rng rng(7);
  Param a("w", 4, 4);
  nn::glorot_fill(a, 4, 4, rng);
  std::vector<Param*> params{&a};
  nn::save_params(dir.file("one.params"), params);
  nn::save_params(dir.file("two.params"), params);
  CHECK(textio::read_file(dir.file("one.params")) ==
        textio::read_file(dir.file("two.params")));
}

TEST_CASE("loader rejects missing, extra and misshapen parameters") {
  test::TempDir dir("params_bad");
  Param a("w", 2, 2), stray("other", 2, 2);
  std::vector<Param*> params{&a};
  nn::save_params(dir.file("m.params"), params);

  Param wrong_name("v", 2, 2);
  std::vector<Param*> by_name{&wrong_name};
  CHECK_THROWS_AS(nn::load_params(dir.file("m.params"), by_name),
                  FormatError);

  Param wrong_shape("w", 2, 3);
  std::vector<Param*> by_shape{&wrong_shape};
  CHECK_THROWS_AS(nn::load_params(dir.file("m.params"), by_shape),
                  FormatError);

  std::vector<Param*> extra{&a, &stray};
  CHECK_THROWS_AS(nn::load_params(dir.file("m.params"), extra), FormatError);

  std::ofstream bad(dir.file("bad.params"));
  bad << "not-a-params-file\n";
  bad.close();
  CHECK_THROWS_AS(nn::load_params(dir.file("bad.params"), params),
                  FormatError);

  std::ofstream trailing(dir.file("trailing.params"),
                         std::ios::binary | std::ios::trunc);
  trailing << textio::read_file(dir.file("m.params")) << "stray trailing\n";
  trailing.close();
  CHECK_THROWS_AS(nn::load_params(dir.file("trailing.params"), params),
                  FormatError);
}

}  // TEST_SUITE
