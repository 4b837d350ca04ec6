#pragma once

#include <vector>

#include "aoisim/net.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

// Doubly stochastic mixing matrix: self-weight w on the diagonal and
// (1-w)/(M-1) everywhere else.
struct MixMatrix {
  int M = 0;
  double w = 0.5;

  MixMatrix() = default;
  MixMatrix(int agents, double self_weight);

  double off_diagonal() const { return M > 1 ? (1.0 - w) / (M - 1) : 0.0; }
  MatX dense() const;
};

// Mixes the agents' parameter vectors: each becomes
//   w * own + sum_{j != i} (1-w)/(M-1) * theta_j
// which is the convex combination alpha*own + (1-alpha)*mean with
// alpha = w - (1-w)/(M-1). The cross-agent mean of every coordinate is
// preserved. Throws on shape mismatch.
std::vector<ParamSet> aggregate(const std::vector<ParamSet>& params, const MixMatrix& mix);

// Aggregation fires at every E_f-th epoch, but never before the second one.
bool aggregation_due(int epoch, int period);

// max over coordinates of (max_i theta_i - min_i theta_i); 0 for <2 agents
double parameter_spread(const std::vector<ParamSet>& params);

}  // namespace aoisim
