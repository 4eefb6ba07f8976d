#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absa/autodiff.hpp"

namespace absa::nn {

using ad::Mat;
using ad::Param;
using ad::Tape;
using ad::Var;
using ad::Vec;

/// Deterministic random source. The mapping from raw engine output to
/// doubles and indices is done by hand because the standard distributions
/// are implementation-defined; a given seed yields the same stream on every
/// platform, which the reproducibility guarantees rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {  // Fisher–Yates
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniform fill in [−l, l] with l = sqrt(6/(fan_in+fan_out)).
void glorot_fill(Param& p, Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng);

/// Parameters of one GRU cell. Gate wiring: z = σ(w_z·x + u_z·h + b_z),
/// r = σ(w_r·x + u_r·h + b_r), candidate h̃ = tanh(w_h·x + u_h·(r⊙h) + b_h),
/// next state (1−z)⊙h + z⊙h̃ — the reset gate acts on the previous state
/// inside the recurrent transform. The unit-test oracle steps the same
/// equations with scalar loops.
struct GruCellParams {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_dim = 0;
  Param w_z, u_z, b_z;
  Param w_r, u_r, b_r;
  Param w_h, u_h, b_h;

  GruCellParams(const std::string& prefix, Eigen::Index input_dim,
                Eigen::Index hidden_dim);
  void init(Rng& rng);
  std::vector<Param*> params();

  /// One recurrent step on the tape.
  Var step(Tape& tape, Var x, Var h_prev);
};

/// A fully connected layer, w·x + b.
struct DenseParams {
  Eigen::Index in_dim = 0;
  Eigen::Index out_dim = 0;
  Param w, b;

  DenseParams(const std::string& prefix, Eigen::Index in_dim,
              Eigen::Index out_dim);
  void init(Rng& rng);
  std::vector<Param*> params();
  Var apply(Tape& tape, Var x) { return tape.affine(w, b, x); }
};

/// Left-to-right GRU run on the tape; one state per input.
std::vector<Var> gru_run(Tape& tape, GruCellParams& cell,
                         std::span<const Var> inputs, Var h0);

/// Value-level forward pass from an explicit initial state. Dimension
/// mismatches raise ShapeError naming the offending sequence index.
std::vector<Vec> gru_forward(GruCellParams& cell,
                             const std::vector<Vec>& inputs, const Vec& h0);

/// Bidirectional composition on the tape: per position,
/// concat(forward state, backward state). Both directions start from zero
/// states. Cells must share input_dim.
std::vector<Var> bigru_run(Tape& tape, GruCellParams& fwd, GruCellParams& bwd,
                           std::span<const Var> inputs);

std::vector<Vec> bigru_forward(GruCellParams& fwd, GruCellParams& bwd,
                               const std::vector<Vec>& inputs);

/// Numerically stable softmax of a plain vector (inference path).
Vec softmax(const Vec& logits);

/// Index of the largest entry; ties resolve to the lowest index.
Eigen::Index argmax_lowest(const Vec& v);

/// Value-level softmax + categorical cross-entropy: (loss, probabilities).
std::pair<double, Vec> softmax_cross_entropy(const Vec& logits,
                                             const Vec& expected);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update of a single tensor. `t` is the 1-based
/// step count after incrementing.
void adam_update(Mat& value, const Mat& grad, Mat& m, Mat& v, std::int64_t t,
                 const AdamConfig& cfg);

/// Adam over a fixed parameter set. Moment accumulators match the parameter
/// shapes; step() consumes the gradients currently held in Param::grad.
class Adam {
 public:
  explicit Adam(std::vector<Param*> params, AdamConfig cfg = {});
  void step();
  std::int64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  struct Slot {
    Mat m, v;
  };
  std::vector<Param*> params_;
  std::vector<Slot> slots_;
  AdamConfig cfg_;
  std::int64_t step_count_ = 0;
};

}  // namespace absa::nn
