#pragma once

#include <cstddef>
#include <vector>

namespace freeway::rl {

// Binary-indexed priority structure over `capacity` leaves (padded to a power
// of two internally). Internal nodes hold the exact sum of their children, so
// proportional sampling is an O(log n) descent.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }

  // Sets a leaf priority (>= 0) and refreshes every ancestor sum and the max
  // tracker.
  void set(std::size_t leaf, double priority);

  double priority(std::size_t leaf) const;
  double total() const { return sums_[1]; }
  double max_priority() const { return maxes_[1]; }

  // Leaf whose prefix-sum interval contains `mass`; requires
  // 0 <= mass < total().
  std::size_t descend(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t leaf_base_;  // first leaf slot in the 1-based heap layout
  std::vector<double> sums_;
  std::vector<double> maxes_;
};

}  // namespace freeway::rl
