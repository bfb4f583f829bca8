#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "freeway/rng.hpp"

namespace freeway::rl {

// One (state, action, reward, next-state, terminal) experience tuple.
struct Transition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

// Fixed-capacity ring storage; once full the oldest entry is overwritten.
class UniformReplay {
 public:
  explicit UniformReplay(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return storage_[i]; }

  // k independent uniform draws with replacement.
  std::vector<std::size_t> sample_indices(std::size_t k, SplitMix64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> storage_;
};

}  // namespace freeway::rl
