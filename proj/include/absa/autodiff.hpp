#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absa/errors.hpp"

namespace absa::ad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A learnable parameter block: a matrix value plus a gradient accumulator of
/// the same shape. Vector-shaped parameters are stored as n×1 matrices.
struct Param {
  std::string name;
  Mat value;
  Mat grad;

  Param(std::string param_name, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(param_name)),
        value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
};

class Tape;

/// Handle to a vector-valued node on a Tape. Default-constructed handles are
/// invalid and rejected by every Tape operation.
class Var {
 public:
  Var() = default;
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int idx) : tape_(tape), idx_(idx) {}
  Tape* tape_ = nullptr;
  int idx_ = -1;
};

/// Reverse-mode tape over vector-valued nodes.
///
/// Build a forward computation with the operations below, finish in a
/// 1-dimensional loss node, then call backward(loss). Gradients with respect
/// to parameters accumulate into Param::grad (callers zero them first);
/// gradients of intermediate nodes are available through grad().
///
/// Nodes are recorded in construction order, which is already a topological
/// order, so the reverse pass is a single backwards walk. A Tape is single
/// use per training step and is not copyable.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Vec v);
  Var param_vector(Param& p);                 // whole n×1 parameter
  Var param_row(Param& p, Eigen::Index row);  // one row of a table, as a vector
  Var matvec(Param& w, Var x);                // w·x
  Var affine(Param& w, Param& b, Var x);      // w·x + b
  // w·x + u·h + b, the pre-activation of a recurrent gate.
  Var gate_preact(Param& w, Var x, Param& u, Var h, Param& b);
  Var add(Var a, Var b);
  Var cmul(Var a, Var b);  // componentwise product
  Var scale(Var a, double s);
  Var sigmoid(Var x);
  Var tanh(Var x);
  Var concat(Var a, Var b);
  // (1−z)⊙keep + z⊙cand, the GRU state mix.
  Var blend(Var z, Var keep, Var cand);

  /// Softmax over `logits` followed by categorical cross-entropy against
  /// `expected`. Returns the scalar loss node and the softmax probabilities.
  /// `expected` must be a probability vector (entries in [0,1], sum within
  /// 1e-9 of 1); anything else is a ContractError.
  std::pair<Var, Vec> softmax_cross_entropy(Var logits, const Vec& expected);

  Var sum(std::span<const Var> scalars);  // sum of 1-dimensional nodes

  const Vec& value(Var v) const;
  const Vec& grad(Var v) const;  // meaningful after backward()

  /// Reverse pass seeded at a scalar node. Throws StateError when `loss` does
  /// not refer to a node of this tape (e.g. backward before any forward) and
  /// ShapeError when the node is not 1-dimensional.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Vec value;
    Vec grad;
    std::function<void()> back;  // empty for leaves
  };

  Var push(Vec value, std::function<void()> back = {});
  const Node& node(Var v) const;
  Vec& grad_ref(Var v) { return nodes_[static_cast<std::size_t>(v.idx_)].grad; }
  void check_mine(Var v, const char* op) const;

  std::vector<Node> nodes_;
};

}  // namespace absa::ad
