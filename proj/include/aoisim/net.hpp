#pragma once

#include <string>
#include <vector>

#include "aoisim/rng.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

enum class OutputActivation { Linear, Sigmoid };

// Flattened trainable parameters of one network plus the layer shape table.
struct ParamSet {
  std::vector<std::pair<int, int>> shapes;  // (in, out) per layer
  VecX values;                              // [W1 column-major | b1 | W2 | b2 | ...]

  Index count() const { return values.size(); }
};

// Small dense feed-forward network: rectified-linear hidden layers and a
// linear or logistic output. Weight matrices are (out x in).
class MlpNet {
 public:
  struct Layer {
    MatX W;
    VecX b;
  };

  MlpNet() = default;
  // dims = {in, hidden..., out}; weights drawn uniform(-s, s), s = 1/sqrt(fan_in)
  MlpNet(const std::vector<int>& dims, OutputActivation out_act, Rng& rng);

  Index input_dim() const { return layers_.front().W.cols(); }
  Index output_dim() const { return layers_.back().W.rows(); }
  Index param_count() const;
  const std::vector<Layer>& layers() const { return layers_; }
  OutputActivation output_activation() const { return out_act_; }

  // single-sample and batched (column-per-sample) forward passes
  VecX forward(const VecX& x) const;
  MatX forward_batch(const MatX& X) const;

  // Backpropagation for a batch: given dL/dY (column per sample), fills
  // parameter gradients (same flat layout as ParamSet) and returns dL/dX.
  // The activations cache must come from forward_cached on the same input.
  struct Cache {
    MatX input;
    std::vector<MatX> pre;   // pre-activation per layer
    std::vector<MatX> post;  // post-activation per layer
  };
  MatX forward_cached(const MatX& X, Cache& cache) const;
  MatX backward(const Cache& cache, const MatX& dY, VecX& grad) const;

  ParamSet params() const;
  void set_params(const ParamSet& p);
  void set_flat(const VecX& values);
  VecX flat() const;

  // theta' <- tau * theta + (1 - tau) * theta'
  static void soft_update(const MlpNet& live, MlpNet& target, double tau);

 private:
  std::vector<Layer> layers_;
  OutputActivation out_act_ = OutputActivation::Linear;
};

// Adam state for one network; lr is passed per call so schedules stay
// outside. `plain_sgd` turns the rule into vanilla gradient descent.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(Index n) : m_(VecX::Zero(n)), v_(VecX::Zero(n)) {}
  void apply(MlpNet& net, const VecX& grad, double lr, bool plain_sgd = false);

 private:
  VecX m_, v_;
  long t_ = 0;
};

// Checkpoint io: flat binary layout
//   magic "APSF0001" | u32 n_layers | n_layers x {u32 in, u32 out}
//   | little-endian f64 values in ParamSet order
void save_paramset(const ParamSet& p, const std::string& path);
ParamSet load_paramset(const std::string& path);

}  // namespace aoisim
