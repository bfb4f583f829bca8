#include "freeway/rl/sum_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freeway/errors.hpp"

namespace freeway::rl {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInput("sum tree capacity must be >= 1");
  leaf_base_ = 1;
  while (leaf_base_ < capacity) leaf_base_ <<= 1;
  sums_.assign(2 * leaf_base_, 0.0);
  maxes_.assign(2 * leaf_base_, 0.0);
}

void SumTree::set(std::size_t leaf, double priority) {
  if (leaf >= capacity_) throw InvalidInput("leaf index out of range");
  if (!(priority >= 0.0) || !std::isfinite(priority))
    throw InvalidInput("priority must be finite and >= 0");
  std::size_t node = leaf_base_ + leaf;
  sums_[node] = priority;
  maxes_[node] = priority;
  // Recompute ancestors from their children so every internal node equals
  // the sum (max) of its children exactly.
  for (node >>= 1; node >= 1; node >>= 1) {
    sums_[node] = sums_[2 * node] + sums_[2 * node + 1];
    maxes_[node] = std::max(maxes_[2 * node], maxes_[2 * node + 1]);
    if (node == 1) break;
  }
}

double SumTree::priority(std::size_t leaf) const {
  if (leaf >= capacity_) throw InvalidInput("leaf index out of range");
  return sums_[leaf_base_ + leaf];
}

std::size_t SumTree::descend(double mass) const {
  if (!(mass >= 0.0) || mass >= total())
    throw InvalidInput("descend mass " + std::to_string(mass) + " outside [0, total)");
  std::size_t node = 1;
  while (node < leaf_base_) {
    const std::size_t left = 2 * node;
    if (mass < sums_[left]) {
      node = left;
    } else {
      mass -= sums_[left];
      node = left + 1;
    }
  }
  return node - leaf_base_;
}

}  // namespace freeway::rl
