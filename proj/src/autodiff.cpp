#include "absa/autodiff.hpp"

#include <cmath>
#include <string>

namespace absa::ad {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

Var Tape::push(Vec value, std::function<void()> back) {
  nodes_.push_back(Node{std::move(value), Vec(), std::move(back)});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

const Tape::Node& Tape::node(Var v) const {
  return nodes_[static_cast<std::size_t>(v.idx_)];
}

void Tape::check_mine(Var v, const char* op) const {
  if (!v.valid() || v.tape_ != this || v.idx_ < 0 ||
      v.idx_ >= static_cast<int>(nodes_.size())) {
    throw StateError(std::string(op) + ": operand is not a node of this tape");
  }
}

Var Tape::constant(Vec v) { return push(std::move(v)); }

Var Tape::param_vector(Param& p) {
  if (p.cols() != 1) {
    throw ShapeError("param_vector: " + p.name + " is " +
                     dims(p.rows(), p.cols()) + ", expected a column vector");
  }
  Var out = push(p.value.col(0));
  Param* pp = &p;
  int self = out.idx_;
  nodes_.back().back = [this, pp, self] { pp->grad.col(0) += nodes_[self].grad; };
  return out;
}

Var Tape::param_row(Param& p, Eigen::Index row) {
  if (row < 0 || row >= p.rows()) {
    throw ShapeError("param_row: row " + std::to_string(row) +
                     " out of range for " + p.name);
  }
  Var out = push(p.value.row(row).transpose());
  Param* pp = &p;
  int self = out.idx_;
  nodes_.back().back = [this, pp, row, self] {
    pp->grad.row(row) += nodes_[self].grad.transpose();
  };
  return out;
}

Var Tape::matvec(Param& w, Var x) {
  check_mine(x, "matvec");
  const Vec& xv = node(x).value;
  if (w.cols() != xv.size()) {
    throw ShapeError("matvec: " + w.name + " is " + dims(w.rows(), w.cols()) +
                     " but input has length " + std::to_string(xv.size()));
  }
  Var out = push(w.value * xv);
  Param* pw = &w;
  int self = out.idx_, xi = x.idx_;
  nodes_.back().back = [this, pw, self, xi] {
    const Vec& g = nodes_[self].grad;
    pw->grad.noalias() += g * nodes_[xi].value.transpose();
    nodes_[xi].grad.noalias() += pw->value.transpose() * g;
  };
  return out;
}

Var Tape::affine(Param& w, Param& b, Var x) {
  check_mine(x, "affine");
  const Vec& xv = node(x).value;
  if (w.cols() != xv.size() || b.rows() != w.rows() || b.cols() != 1) {
    throw ShapeError("affine: " + w.name + " " + dims(w.rows(), w.cols()) +
                     ", " + b.name + " " + dims(b.rows(), b.cols()) +
                     " incompatible with input length " +
                     std::to_string(xv.size()));
  }
  Var out = push(w.value * xv + b.value.col(0));
  Param *pw = &w, *pb = &b;
  int self = out.idx_, xi = x.idx_;
  nodes_.back().back = [this, pw, pb, self, xi] {
    const Vec& g = nodes_[self].grad;
    pw->grad.noalias() += g * nodes_[xi].value.transpose();
    pb->grad.col(0) += g;
    nodes_[xi].grad.noalias() += pw->value.transpose() * g;
  };
  return out;
}

Var Tape::gate_preact(Param& w, Var x, Param& u, Var h, Param& b) {
  check_mine(x, "gate_preact");
  check_mine(h, "gate_preact");
  const Vec& xv = node(x).value;
  const Vec& hv = node(h).value;
  if (w.cols() != xv.size() || u.cols() != hv.size() ||
      w.rows() != u.rows() || b.rows() != w.rows() || b.cols() != 1) {
    throw ShapeError("gate_preact: " + w.name + " " +
                     dims(w.rows(), w.cols()) + " / " + u.name + " " +
                     dims(u.rows(), u.cols()) + " incompatible with inputs " +
                     std::to_string(xv.size()) + ", " +
                     std::to_string(hv.size()));
  }
  Var out = push(w.value * xv + u.value * hv + b.value.col(0));
  Param *pw = &w, *pu = &u, *pb = &b;
  int self = out.idx_, xi = x.idx_, hi = h.idx_;
  nodes_.back().back = [this, pw, pu, pb, self, xi, hi] {
    const Vec& g = nodes_[self].grad;
    pw->grad.noalias() += g * nodes_[xi].value.transpose();
    pu->grad.noalias() += g * nodes_[hi].value.transpose();
    pb->grad.col(0) += g;
    nodes_[xi].grad.noalias() += pw->value.transpose() * g;
    nodes_[hi].grad.noalias() += pu->value.transpose() * g;
  };
  return out;
}

Var Tape::add(Var a, Var b) {
  check_mine(a, "add");
  check_mine(b, "add");
  if (node(a).value.size() != node(b).value.size()) {
    throw ShapeError("add: lengths " + std::to_string(node(a).value.size()) +
                     " and " + std::to_string(node(b).value.size()));
  }
  Var out = push(node(a).value + node(b).value);
  int self = out.idx_, ai = a.idx_, bi = b.idx_;
  nodes_.back().back = [this, self, ai, bi] {
    nodes_[ai].grad += nodes_[self].grad;
    nodes_[bi].grad += nodes_[self].grad;
  };
  return out;
}

Var Tape::cmul(Var a, Var b) {
  check_mine(a, "cmul");
  check_mine(b, "cmul");
  if (node(a).value.size() != node(b).value.size()) {
    throw ShapeError("cmul: lengths " + std::to_string(node(a).value.size()) +
                     " and " + std::to_string(node(b).value.size()));
  }
  Var out = push(node(a).value.cwiseProduct(node(b).value));
  int self = out.idx_, ai = a.idx_, bi = b.idx_;
  nodes_.back().back = [this, self, ai, bi] {
    const Vec& g = nodes_[self].grad;
    nodes_[ai].grad += g.cwiseProduct(nodes_[bi].value);
    nodes_[bi].grad += g.cwiseProduct(nodes_[ai].value);
  };
  return out;
}

Var Tape::scale(Var a, double s) {
  check_mine(a, "scale");
  Var out = push(node(a).value * s);
  int self = out.idx_, ai = a.idx_;
  nodes_.back().back = [this, self, ai, s] {
    nodes_[ai].grad += nodes_[self].grad * s;
  };
  return out;
}

Var Tape::sigmoid(Var x) {
  check_mine(x, "sigmoid");
  Vec y = node(x).value.unaryExpr(
      [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  Var out = push(std::move(y));
  int self = out.idx_, xi = x.idx_;
  nodes_.back().back = [this, self, xi] {
    const Vec& y = nodes_[self].value;
    nodes_[xi].grad +=
        nodes_[self].grad.cwiseProduct(y.cwiseProduct(Vec::Ones(y.size()) - y));
  };
  return out;
}

Var Tape::tanh(Var x) {
  check_mine(x, "tanh");
  Vec y = node(x).value.unaryExpr([](double v) { return std::tanh(v); });
  Var out = push(std::move(y));
  int self = out.idx_, xi = x.idx_;
  nodes_.back().back = [this, self, xi] {
    const Vec& y = nodes_[self].value;
    nodes_[xi].grad += nodes_[self].grad.cwiseProduct(
        Vec::Ones(y.size()) - y.cwiseProduct(y));
  };
  return out;
}

Var Tape::concat(Var a, Var b) {
  check_mine(a, "concat");
  check_mine(b, "concat");
  // sizes must be taken before push(): growing the node vector invalidates
  // references into it
  const Eigen::Index na = node(a).value.size();
  const Eigen::Index nb = node(b).value.size();
  Vec y(na + nb);
  y << node(a).value, node(b).value;
  Var out = push(std::move(y));
  int self = out.idx_, ai = a.idx_, bi = b.idx_;
  nodes_.back().back = [this, self, ai, bi, na, nb] {
    nodes_[ai].grad += nodes_[self].grad.head(na);
    nodes_[bi].grad += nodes_[self].grad.tail(nb);
  };
  return out;
}

Var Tape::blend(Var z, Var keep, Var cand) {
  check_mine(z, "blend");
  check_mine(keep, "blend");
  check_mine(cand, "blend");
  const Vec& zv = node(z).value;
  const Vec& kv = node(keep).value;
  const Vec& cv = node(cand).value;
  if (zv.size() != kv.size() || zv.size() != cv.size()) {
    throw ShapeError("blend: mismatched lengths");
  }
  Vec y = (Vec::Ones(zv.size()) - zv).cwiseProduct(kv) + zv.cwiseProduct(cv);
  Var out = push(std::move(y));
  int self = out.idx_, zi = z.idx_, ki = keep.idx_, ci = cand.idx_;
  nodes_.back().back = [this, self, zi, ki, ci] {
    const Vec& g = nodes_[self].grad;
    const Vec& zv = nodes_[zi].value;
    nodes_[zi].grad += g.cwiseProduct(nodes_[ci].value - nodes_[ki].value);
    nodes_[ki].grad += g.cwiseProduct(Vec::Ones(zv.size()) - zv);
    nodes_[ci].grad += g.cwiseProduct(zv);
  };
  return out;
}

std::pair<Var, Vec> Tape::softmax_cross_entropy(Var logits,
                                                const Vec& expected) {
  check_mine(logits, "softmax_cross_entropy");
  const Vec& lv = node(logits).value;
  if (lv.size() != expected.size()) {
    throw ShapeError("softmax_cross_entropy: logits length " +
                     std::to_string(lv.size()) + " vs expected length " +
                     std::to_string(expected.size()));
  }
  if (expected.size() == 0) {
    throw ContractError("softmax_cross_entropy: empty distribution");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < expected.size(); ++i) {
    if (expected[i] < 0.0 || expected[i] > 1.0) {
      throw ContractError(
          "softmax_cross_entropy: expected[" + std::to_string(i) +
          "] = " + std::to_string(expected[i]) + " outside [0,1]");
    }
    total += expected[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ContractError("softmax_cross_entropy: expected sums to " +
                        std::to_string(total) + ", not 1");
  }

  const double m = lv.maxCoeff();
  Vec shifted = lv.array() - m;
  Vec exps = shifted.array().exp();
  const double z = exps.sum();
  Vec probs = exps / z;
  // loss = −Σ expected·log(probs), evaluated through the shifted logits so
  // log never sees a rounded-to-zero probability.
  const double log_z = std::log(z);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < expected.size(); ++i) {
    if (expected[i] != 0.0) loss -= expected[i] * (shifted[i] - log_z);
  }

  Var out = push(Vec::Constant(1, loss));
  int self = out.idx_, li = logits.idx_;
  Vec diff = probs - expected;
  nodes_.back().back = [this, self, li, diff = std::move(diff)] {
    nodes_[li].grad += nodes_[self].grad[0] * diff;
  };
  return {out, std::move(probs)};
}

Var Tape::sum(std::span<const Var> scalars) {
  std::vector<int> idx;
  idx.reserve(scalars.size());
  double total = 0.0;
  for (Var v : scalars) {
    check_mine(v, "sum");
    if (node(v).value.size() != 1) {
      throw ShapeError("sum: operand is not scalar");
    }
    total += node(v).value[0];
    idx.push_back(v.idx_);
  }
  Var out = push(Vec::Constant(1, total));
  int self = out.idx_;
  nodes_.back().back = [this, self, idx = std::move(idx)] {
    for (int i : idx) nodes_[i].grad[0] += nodes_[self].grad[0];
  };
  return out;
}

const Vec& Tape::value(Var v) const {
  check_mine(v, "value");
  return node(v).value;
}

const Vec& Tape::grad(Var v) const {
  check_mine(v, "grad");
  return node(v).grad;
}

void Tape::backward(Var loss) {
  if (!loss.valid() || loss.tape_ != this || nodes_.empty()) {
    throw StateError("backward: no completed forward computation on this tape");
  }
  check_mine(loss, "backward");
  if (node(loss).value.size() != 1) {
    throw ShapeError("backward: loss node is not scalar");
  }
  for (Node& n : nodes_) n.grad = Vec::Zero(n.value.size());
  nodes_[static_cast<std::size_t>(loss.idx_)].grad[0] = 1.0;
  for (int i = loss.idx_; i >= 0; --i) {
    const std::size_t k = static_cast<std::size_t>(i);
    if (nodes_[k].back && (nodes_[k].grad.array() != 0.0).any()) {
      nodes_[k].back();
    }
  }
}

}  // namespace absa::ad
