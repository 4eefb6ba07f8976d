#include "absa/retrofit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "absa/errors.hpp"

namespace absa {

LexicalGraph::LexicalGraph(int node_count) {
  if (node_count < 0) {
    throw ContractError("LexicalGraph: negative node count");
  }
  adjacency_.resize(static_cast<std::size_t>(node_count));
  alpha_.assign(static_cast<std::size_t>(node_count), 1.0);
}

void LexicalGraph::check_node(int node, const char* op) const {
  if (node < 0 || node >= node_count()) {
    throw ContractError(std::string(op) + ": node " + std::to_string(node) +
                        " out of range");
  }
}

void LexicalGraph::add_edge(int a, int b, double weight) {
  check_node(a, "add_edge");
  check_node(b, "add_edge");
  if (a == b) {
    throw ContractError("add_edge: self loop at node " + std::to_string(a));
  }
  if (weight < 0.0) {
    throw ContractError("add_edge: negative weight");
  }
  auto set_half = [](std::vector<std::pair<int, double>>& list, int to,
                     double w) {
    for (auto& [node, weight_ref] : list) {
      if (node == to) {
        weight_ref = w;
        return false;
      }
    }
    list.emplace_back(to, w);
    return true;
  };
  const bool fresh = set_half(adjacency_[static_cast<std::size_t>(a)], b, weight);
  set_half(adjacency_[static_cast<std::size_t>(b)], a, weight);
  if (fresh) ++edge_count_;
}

void LexicalGraph::set_alpha(int node, double alpha) {
  check_node(node, "set_alpha");
  if (alpha < 0.0) {
    throw ContractError("set_alpha: negative alpha");
  }
  alpha_[static_cast<std::size_t>(node)] = alpha;
}

int LexicalGraph::degree(int node) const {
  check_node(node, "degree");
  return static_cast<int>(adjacency_[static_cast<std::size_t>(node)].size());
}

double LexicalGraph::alpha(int node) const {
  check_node(node, "alpha");
  return alpha_[static_cast<std::size_t>(node)];
}

const std::vector<std::pair<int, double>>& LexicalGraph::neighbors(
    int node) const {
  check_node(node, "neighbors");
  return adjacency_[static_cast<std::size_t>(node)];
}

std::vector<std::tuple<int, int, double>> LexicalGraph::edges() const {
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(edge_count_);
  for (int a = 0; a < node_count(); ++a) {
    for (const auto& [b, w] : adjacency_[static_cast<std::size_t>(a)]) {
      if (a < b) out.emplace_back(a, b, w);
    }
  }
  return out;
}

namespace {

void check_same_shape(const EmbeddingTable& original,
                      const EmbeddingTable& current, int nodes) {
  if (original.dim != current.dim ||
      original.rows.rows() != current.rows.rows()) {
    throw ShapeError("retrofit: tables disagree on shape");
  }
  if (original.rows.rows() != nodes) {
    throw ShapeError("retrofit: graph has " + std::to_string(nodes) +
                     " nodes but table has " +
                     std::to_string(original.rows.rows()) + " rows");
  }
}

}  // namespace

double retrofit_objective(const EmbeddingTable& original,
                          const EmbeddingTable& current,
                          const LexicalGraph& graph) {
  check_same_shape(original, current, graph.node_count());
  double total = 0.0;
  for (int i = 0; i < graph.node_count(); ++i) {
    total += graph.alpha(i) *
             (current.rows.row(i) - original.rows.row(i)).squaredNorm();
  }
  for (const auto& [a, b, w] : graph.edges()) {
    total += w * (current.rows.row(a) - current.rows.row(b)).squaredNorm();
  }
  return total;
}

EmbeddingTable retrofit(const EmbeddingTable& original,
                        const LexicalGraph& graph, int iterations) {
  if (iterations <= 0) {
    throw ContractError("retrofit: iterations must be positive");
  }
  check_same_shape(original, original, graph.node_count());
  EmbeddingTable fitted = original;
  for (int sweep = 0; sweep < iterations; ++sweep) {
    for (int i = 0; i < graph.node_count(); ++i) {
      const auto& nbrs = graph.neighbors(i);
      if (nbrs.empty()) continue;
      double denom = graph.alpha(i);
      Eigen::RowVectorXd numer = graph.alpha(i) * original.rows.row(i);
      for (const auto& [j, w] : nbrs) {
        denom += w;
        numer += w * fitted.rows.row(j);
      }
      if (denom <= 0.0) {
        throw ConfigError("retrofit: node " + std::to_string(i) +
                          " has zero total weight");
      }
      fitted.rows.row(i) = numer / denom;
    }
  }
  return fitted;
}

LexicalGraph load_graph(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  // First pass collects the undirected neighbor sets; weights need the full
  // degrees, so edges are weighted afterwards.
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(vocab.size()));
  auto link = [&](int a, int b) {
    auto& list = nbr[static_cast<std::size_t>(a)];
    if (std::find(list.begin(), list.end(), b) == list.end()) {
      list.push_back(b);
    }
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::string word;
    if (!(s >> word)) continue;  // whitespace-only
    std::string neighbor;
    bool any_field = false;
    const auto word_id = vocab.find(word);
    while (s >> neighbor) {
      any_field = true;
      if (!word_id) continue;
      const auto neighbor_id = vocab.find(neighbor);
      if (!neighbor_id || *neighbor_id == *word_id) continue;
      link(*word_id, *neighbor_id);
      link(*neighbor_id, *word_id);
    }
    if (!any_field) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": word '" +
                        word + "' lists no neighbors");
    }
  }

  LexicalGraph graph(vocab.size());
  for (int a = 0; a < vocab.size(); ++a) {
    for (int b : nbr[static_cast<std::size_t>(a)]) {
      if (a < b) {
        const int deg_a = static_cast<int>(nbr[static_cast<std::size_t>(a)].size());
        const int deg_b = static_cast<int>(nbr[static_cast<std::size_t>(b)].size());
        graph.add_edge(a, b, 1.0 / static_cast<double>(std::max(deg_a, deg_b)));
      }
    }
  }
  return graph;
}

}  // namespace absa
