#include "absa/nn.hpp"

#include <cmath>

namespace absa::nn {

void glorot_fill(Param& p, Eigen::Index fan_in, Eigen::Index fan_out,
                 Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      p.value(i, j) = rng.uniform(-limit, limit);
    }
  }
}

GruCellParams::GruCellParams(const std::string& prefix, Eigen::Index in,
                             Eigen::Index hidden)
    : input_dim(in),
      hidden_dim(hidden),
      w_z(prefix + ".z.w", hidden, in),
      u_z(prefix + ".z.u", hidden, hidden),
      b_z(prefix + ".z.b", hidden, 1),
      w_r(prefix + ".r.w", hidden, in),
      u_r(prefix + ".r.u", hidden, hidden),
      b_r(prefix + ".r.b", hidden, 1),
      w_h(prefix + ".h.w", hidden, in),
      u_h(prefix + ".h.u", hidden, hidden),
      b_h(prefix + ".h.b", hidden, 1) {
  if (in <= 0 || hidden <= 0) {
    throw ShapeError("GruCellParams " + prefix + ": dims must be positive");
  }
}

void GruCellParams::init(Rng& rng) {
  glorot_fill(w_z, input_dim, hidden_dim, rng);
  glorot_fill(u_z, hidden_dim, hidden_dim, rng);
  glorot_fill(w_r, input_dim, hidden_dim, rng);
  glorot_fill(u_r, hidden_dim, hidden_dim, rng);
  glorot_fill(w_h, input_dim, hidden_dim, rng);
  glorot_fill(u_h, hidden_dim, hidden_dim, rng);
  b_z.value.setZero();
  b_r.value.setZero();
  b_h.value.setZero();
}

std::vector<Param*> GruCellParams::params() {
  return {&w_z, &u_z, &b_z, &w_r, &u_r, &b_r, &w_h, &u_h, &b_h};
}

Var GruCellParams::step(Tape& tape, Var x, Var h_prev) {
  Var z = tape.sigmoid(tape.gate_preact(w_z, x, u_z, h_prev, b_z));
  Var r = tape.sigmoid(tape.gate_preact(w_r, x, u_r, h_prev, b_r));
  Var gated = tape.cmul(r, h_prev);
  Var cand = tape.tanh(tape.gate_preact(w_h, x, u_h, gated, b_h));
  return tape.blend(z, h_prev, cand);
}

DenseParams::DenseParams(const std::string& prefix, Eigen::Index in,
                         Eigen::Index out)
    : in_dim(in), out_dim(out), w(prefix + ".w", out, in),
      b(prefix + ".b", out, 1) {
  if (in <= 0 || out <= 0) {
    throw ShapeError("DenseParams " + prefix + ": dims must be positive");
  }
}

void DenseParams::init(Rng& rng) {
  glorot_fill(w, in_dim, out_dim, rng);
  b.value.setZero();
}

std::vector<Param*> DenseParams::params() { return {&w, &b}; }

std::vector<Var> gru_run(Tape& tape, GruCellParams& cell,
                         std::span<const Var> inputs, Var h0) {
  std::vector<Var> states;
  states.reserve(inputs.size());
  Var h = h0;
  for (const Var& x : inputs) {
    h = cell.step(tape, x, h);
    states.push_back(h);
  }
  return states;
}

std::vector<Vec> gru_forward(GruCellParams& cell,
                             const std::vector<Vec>& inputs, const Vec& h0) {
  if (h0.size() != cell.hidden_dim) {
    throw ShapeError("gru_forward: initial state has length " +
                     std::to_string(h0.size()) + ", expected " +
                     std::to_string(cell.hidden_dim));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != cell.input_dim) {
      throw ShapeError("gru_forward: input " + std::to_string(i) +
                       " has length " + std::to_string(inputs[i].size()) +
                       ", expected " + std::to_string(cell.input_dim));
    }
  }
  Tape tape;
  std::vector<Var> in;
  in.reserve(inputs.size());
  for (const Vec& x : inputs) in.push_back(tape.constant(x));
  std::vector<Var> states = gru_run(tape, cell, in, tape.constant(h0));
  std::vector<Vec> out;
  out.reserve(states.size());
  for (Var s : states) out.push_back(tape.value(s));
  return out;
}

std::vector<Var> bigru_run(Tape& tape, GruCellParams& fwd, GruCellParams& bwd,
                           std::span<const Var> inputs) {
  if (fwd.input_dim != bwd.input_dim) {
    throw ShapeError("bigru_run: cells disagree on input_dim");
  }
  Var hf = tape.constant(Vec::Zero(fwd.hidden_dim));
  Var hb = tape.constant(Vec::Zero(bwd.hidden_dim));
  std::vector<Var> forward = gru_run(tape, fwd, inputs, hf);
  std::vector<Var> rev(inputs.rbegin(), inputs.rend());
  std::vector<Var> backward = gru_run(tape, bwd, rev, hb);
  std::vector<Var> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.push_back(tape.concat(forward[i], backward[inputs.size() - 1 - i]));
  }
  return out;
}

std::vector<Vec> bigru_forward(GruCellParams& fwd, GruCellParams& bwd,
                               const std::vector<Vec>& inputs) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != fwd.input_dim) {
      throw ShapeError("bigru_forward: input " + std::to_string(i) +
                       " has length " + std::to_string(inputs[i].size()) +
                       ", expected " + std::to_string(fwd.input_dim));
    }
  }
  Tape tape;
  std::vector<Var> in;
  in.reserve(inputs.size());
  for (const Vec& x : inputs) in.push_back(tape.constant(x));
  std::vector<Var> states = bigru_run(tape, fwd, bwd, in);
  std::vector<Vec> out;
  out.reserve(states.size());
  for (Var s : states) out.push_back(tape.value(s));
  return out;
}

Vec softmax(const Vec& logits) {
  const double m = logits.maxCoeff();
  Vec exps = (logits.array() - m).exp();
  return exps / exps.sum();
}

Eigen::Index argmax_lowest(const Vec& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::pair<double, Vec> softmax_cross_entropy(const Vec& logits,
                                             const Vec& expected) {
  Tape tape;
  auto [loss, probs] =
      tape.softmax_cross_entropy(tape.constant(logits), expected);
  return {tape.value(loss)[0], std::move(probs)};
}

void adam_update(Mat& value, const Mat& grad, Mat& m, Mat& v, std::int64_t t,
                 const AdamConfig& cfg) {
  if (grad.rows() != value.rows() || grad.cols() != value.cols() ||
      m.rows() != value.rows() || m.cols() != value.cols() ||
      v.rows() != value.rows() || v.cols() != value.cols()) {
    throw ShapeError("adam_update: parameter, gradient and moment shapes "
                     "disagree");
  }
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double mc = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double vc = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  Mat m_hat = m / mc;
  Mat v_hat = v / vc;
  value.array() -=
      cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
}

Adam::Adam(std::vector<Param*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  slots_.reserve(params_.size());
  for (Param* p : params_) {
    slots_.push_back(Slot{Mat::Zero(p->rows(), p->cols()),
                          Mat::Zero(p->rows(), p->cols())});
  }
}

void Adam::step() {
  ++step_count_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adam_update(params_[i]->value, params_[i]->grad, slots_[i].m, slots_[i].v,
                step_count_, cfg_);
  }
}

}  // namespace absa::nn
