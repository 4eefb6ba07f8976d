#pragma once

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "absa/embeddings.hpp"

namespace absa {

/// Undirected word-relation graph for retrofitting. Each edge {a, b} carries
/// one weight, visible from both endpoints, and each node an anchor weight
/// alpha that ties it to its original vector. Weights must be nonnegative.
class LexicalGraph {
 public:
  explicit LexicalGraph(int node_count);

  /// Adds (or reweights) the undirected edge {a, b}. Self loops are
  /// rejected.
  void add_edge(int a, int b, double weight);
  void set_alpha(int node, double alpha);

  int node_count() const { return static_cast<int>(adjacency_.size()); }
  int degree(int node) const;
  double alpha(int node) const;
  const std::vector<std::pair<int, double>>& neighbors(int node) const;
  /// Each undirected edge once, as (a, b, weight) with a < b.
  std::vector<std::tuple<int, int, double>> edges() const;
  std::size_t edge_count() const { return edge_count_; }

 private:
  void check_node(int node, const char* op) const;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::vector<double> alpha_;
  std::size_t edge_count_ = 0;
};

/// The retrofitting objective: for every node the weighted squared distance
/// to its original vector, plus for every edge the weighted squared distance
/// between its endpoints (each edge counted once). Zero when the tables
/// coincide and no edges pull them apart.
double retrofit_objective(const EmbeddingTable& original,
                          const EmbeddingTable& current,
                          const LexicalGraph& graph);

/// Runs `iterations` full sweeps of in-place node updates in ascending id
/// order. Each visited node with at least one edge moves to
///   (alpha·original + Σ weight·neighbor) / (alpha + Σ weight),
/// which is the exact minimizer of the objective in that node's coordinate,
/// so the objective never increases across sweeps. Nodes without edges are
/// returned bit-identical to their originals. A node whose denominator is
/// zero raises ConfigError naming it.
EmbeddingTable retrofit(const EmbeddingTable& original,
                        const LexicalGraph& graph, int iterations);

/// Reads "word neighbor1 neighbor2 …" lines into an undirected graph over
/// the vocabulary. Words and neighbors outside the vocabulary are dropped
/// (dropped neighbors do not count toward degrees). After the full load,
/// every alpha is 1 and edge {a, b} gets weight 1/max(degree(a), degree(b)).
/// Lines with a word but no neighbors are format errors; blank lines and
/// lines starting with '#' are skipped.
LexicalGraph load_graph(const std::string& path, const Vocabulary& vocab);

}  // namespace absa
