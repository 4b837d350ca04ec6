#pragma once

#include <vector>

#include "aoisim/rng.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

// One stored step: concatenated global state/action, the per-agent local
// rewards, the global reward, and the successor state.
struct Transition {
  VecX state;
  VecX action;
  VecX reward_local;  // one entry per UAV agent (empty in the direct variant)
  double reward_global = 0.0;
  VecX next_state;
};

// Fixed-capacity ring of transitions with uniform sampling; indices within
// one batch are drawn without replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void add(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return data_[i]; }

  // batch of distinct indices; batch must not exceed size()
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const {
    std::vector<std::size_t> idx;
    idx.reserve(batch);
    // partial Fisher-Yates over an implicit [0, n) range
    std::vector<std::size_t> pool(data_.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = 0; i < batch && i < pool.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
      std::swap(pool[i], pool[j]);
      idx.push_back(pool[i]);
    }
    return idx;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

}  // namespace aoisim
