#include "freeway/rl/replay.hpp"

#include "freeway/errors.hpp"

namespace freeway::rl {

UniformReplay::UniformReplay(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInput("replay capacity must be >= 1");
  storage_.reserve(capacity);
}

void UniformReplay::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> UniformReplay::sample_indices(std::size_t k, SplitMix64& rng) const {
  if (storage_.empty()) throw InvalidInput("sampling from an empty replay buffer");
  std::vector<std::size_t> indices(k);
  for (std::size_t i = 0; i < k; ++i)
    indices[i] = static_cast<std::size_t>(rng.next_below(static_cast<int>(storage_.size())));
  return indices;
}

}  // namespace freeway::rl
