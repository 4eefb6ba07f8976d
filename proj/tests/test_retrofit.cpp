#include <doctest.h>

#include <fstream>

#include "absa/retrofit.hpp"
#include "test_util.hpp"

using namespace absa;
using ad::Mat;

namespace {

EmbeddingTable random_table(nn::Rng& rng, int nodes, int dim) {
  EmbeddingTable t;
  t.dim = dim;
  t.rows = Mat::Zero(nodes, dim);
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < dim; ++j) t.rows(i, j) = rng.uniform(-1, 1);
  }
  return t;
}

LexicalGraph random_graph(nn::Rng& rng, int nodes, double edge_prob) {
  LexicalGraph g(nodes);
  for (int a = 0; a < nodes; ++a) {
    for (int b = a + 1; b < nodes; ++b) {
      if (rng.uniform() < edge_prob) {
        g.add_edge(a, b, rng.uniform(0.05, 2.0));
      }
    }
  }
  return g;
}

// Literal double-loop evaluation of the objective, independent of the
// Eigen-based implementation.
double objective_oracle(const EmbeddingTable& original,
                        const EmbeddingTable& current,
                        const LexicalGraph& graph) {
  double total = 0.0;
  for (int i = 0; i < graph.node_count(); ++i) {
    double d = 0.0;
    for (int j = 0; j < current.dim; ++j) {
      const double diff = current.rows(i, j) - original.rows(i, j);
      d += diff * diff;
    }
    total += graph.alpha(i) * d;
  }
  for (const auto& [a, b, w] : graph.edges()) {
    double d = 0.0;
    for (int j = 0; j < current.dim; ++j) {
      const double diff = current.rows(a, j) - current.rows(b, j);
      d += diff * diff;
    }
    total += w * d;
  }
  return total;
}

}  // namespace

TEST_SUITE("retrofit") {

TEST_CASE("objective is zero for identical tables with no edges") {
  nn::Rng rng(1);
  EmbeddingTable t = random_table(rng, 4, 3);
  LexicalGraph g(4);
  CHECK(retrofit_objective(t, t, g) == 0.0);
}

TEST_CASE("objective of a single displaced node is the squared shift") {
  nn::Rng rng(2);
  EmbeddingTable original = random_table(rng, 2, 3);
  EmbeddingTable moved = original;
  moved.rows(1, 0) += 1.0;  // unit displacement, alpha = 1
  LexicalGraph g(2);
  CHECK(retrofit_objective(original, moved, g) == doctest::Approx(1.0));
}

TEST_CASE("objective matches a literal double-loop oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    nn::Rng rng(seed);
    EmbeddingTable original = random_table(rng, 5, 4);
    EmbeddingTable current = random_table(rng, 5, 4);
    LexicalGraph g = random_graph(rng, 5, 0.6);
    CHECK(retrofit_objective(original, current, g) ==
          doctest::Approx(objective_oracle(original, current, g))
              .epsilon(1e-12));
  }
}

TEST_CASE("objective rejects mismatched shapes") {
  nn::Rng rng(3);
  EmbeddingTable a = random_table(rng, 4, 3);
  EmbeddingTable b = random_table(rng, 4, 2);
  LexicalGraph g(4);
  CHECK_THROWS_AS(retrofit_objective(a, b, g), ShapeError);
}

TEST_CASE("isolated nodes come back bit-identical") {
  nn::Rng rng(4);
  EmbeddingTable original = random_table(rng, 6, 3);
  LexicalGraph g(6);
  g.add_edge(0, 1, 1.0);  // nodes 2..5 isolated
  EmbeddingTable fitted = retrofit(original, g, 25);
  for (int i = 2; i < 6; ++i) {
    CHECK(fitted.rows.row(i) == original.rows.row(i));
  }
}

TEST_CASE("one update moves a node to the midpoint of anchor and neighbor") {
  // single edge, alpha = beta = 1: the first sweep updates node 0 while
  // node 1 still has its original vector
  nn::Rng rng(5);
  EmbeddingTable original = random_table(rng, 2, 3);
  LexicalGraph g(2);
  g.add_edge(0, 1, 1.0);
  EmbeddingTable fitted = retrofit(original, g, 1);
  const Eigen::RowVector3d expect =
      (original.rows.row(0) + original.rows.row(1)) / 2.0;
  CHECK((fitted.rows.row(0) - expect).norm() < 1e-15);
}

TEST_CASE("two linked nodes converge to the closed-form fixed point") {
  // stationary updates solve, per dimension,
  //   (1+β)w0 − βw1 = ŵ0
  //   −βw0 + (1+β)w1 = ŵ1
  nn::Rng rng(6);
  EmbeddingTable original = random_table(rng, 2, 4);
  const double beta = 1.0;
  LexicalGraph g(2);
  g.add_edge(0, 1, beta);
  EmbeddingTable fitted = retrofit(original, g, 200);

  Eigen::Matrix2d system;
  system << 1.0 + beta, -beta, -beta, 1.0 + beta;
  for (int d = 0; d < 4; ++d) {
    Eigen::Vector2d rhs(original.rows(0, d), original.rows(1, d));
    Eigen::Vector2d solution = system.colPivHouseholderQr().solve(rhs);
    CHECK(std::abs(fitted.rows(0, d) - solution[0]) < 1e-9);
    CHECK(std::abs(fitted.rows(1, d) - solution[1]) < 1e-9);
  }
}

TEST_CASE("objective never increases across sweeps") {
  // retrofit(original, g, k+1) extends retrofit(original, g, k) by exactly
  // one sweep, so rerunning with growing counts walks the sweep trajectory
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    nn::Rng rng(seed * 31);
    EmbeddingTable original = random_table(rng, 9, 4);
    LexicalGraph g = random_graph(rng, 9, 0.5);
    double last = retrofit_objective(original, original, g);
    for (int sweeps = 1; sweeps <= 10; ++sweeps) {
      EmbeddingTable w = retrofit(original, g, sweeps);
      const double now = retrofit_objective(original, w, g);
      CHECK(now <= last + 1e-12);
      last = now;
    }
  }
}

TEST_CASE("zero edge weights make retrofit the identity") {
  nn::Rng rng(8);
  EmbeddingTable original = random_table(rng, 5, 3);
  LexicalGraph g(5);
  g.add_edge(0, 1, 0.0);
  g.add_edge(2, 3, 0.0);
  EmbeddingTable fitted = retrofit(original, g, 10);
  CHECK(fitted.rows == original.rows);
}

TEST_CASE("sweeps are reproducible bit for bit") {
  nn::Rng rng(9);
  EmbeddingTable original = random_table(rng, 7, 3);
  LexicalGraph g = random_graph(rng, 7, 0.5);
  EmbeddingTable a = retrofit(original, g, 10);
  EmbeddingTable b = retrofit(original, g, 10);
  CHECK(a.rows == b.rows);
}

TEST_CASE("a node with zero total weight is a configuration error") {
  nn::Rng rng(10);
  EmbeddingTable original = random_table(rng, 2, 2);
  LexicalGraph g(2);
  g.add_edge(0, 1, 0.0);
  g.set_alpha(0, 0.0);
  try {
    retrofit(original, g, 1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("node 0") != std::string::npos);
  }
}

TEST_CASE("iterations must be positive") {
  nn::Rng rng(11);
  EmbeddingTable original = random_table(rng, 2, 2);
  LexicalGraph g(2);
  CHECK_THROWS_AS(retrofit(original, g, 0), ContractError);
}

TEST_CASE("graph loading follows the line format") {
  test::TempDir dir("graph");
  Vocabulary vocab;
  for (const char* w : {"good", "great", "fine", "bad"}) vocab.add(w);
  vocab.add(kUnkToken);

  SUBCASE("a line's word links to each listed neighbor") {
    std::ofstream out(dir.file("g.txt"));
    out << "good great fine\n";
    out.close();
    LexicalGraph g = load_graph(dir.file("g.txt"), vocab);
    CHECK(g.edge_count() == 2);
    CHECK(g.degree(0) == 2);  // good
    for (const auto& [nbr, w] : g.neighbors(0)) {
      CHECK(w == doctest::Approx(0.5));  // 1/degree(good)
    }
  }

  SUBCASE("neighbors outside the vocabulary are dropped from degrees") {
    std::ofstream out(dir.file("g.txt"));
    out << "good great nosuchword\n";
    out.close();
    LexicalGraph g = load_graph(dir.file("g.txt"), vocab);
    CHECK(g.edge_count() == 1);
    CHECK(g.degree(0) == 1);
    CHECK(g.neighbors(0)[0].second == doctest::Approx(1.0));
  }

  SUBCASE("an empty file yields no edges and identity retrofit") {
    std::ofstream out(dir.file("g.txt"));
    out.close();
    LexicalGraph g = load_graph(dir.file("g.txt"), vocab);
    CHECK(g.edge_count() == 0);
    nn::Rng rng(12);
    EmbeddingTable original = random_table(rng, vocab.size(), 3);
    EmbeddingTable fitted = retrofit(original, g, 10);
    CHECK(fitted.rows == original.rows);
  }

  SUBCASE("a word with no neighbors is a format error with line number") {
    std::ofstream out(dir.file("g.txt"));
    out << "good great\n";
    out << "bad\n";
    out.close();
    try {
      load_graph(dir.file("g.txt"), vocab);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
}

}  // TEST_SUITE
