#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "freeway/nn/network.hpp"
#include "freeway/rl/replay.hpp"
#include "freeway/rl/sum_tree.hpp"
#include "freeway/rng.hpp"

namespace freeway::rl {

enum class Variant { kDql, kDdql, kDueling, kPer };

std::string variant_name(Variant v);
Variant variant_from_string(const std::string& name);

struct EpsSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.5;  // fraction of total steps spent decaying

  // Linear decay from start to end over the first decay_fraction of
  // total_steps, constant afterwards.
  double at(std::int64_t step, std::int64_t total_steps) const;
};

struct PerConfig {
  double psi = 0.6;          // prioritization exponent, applied at write time
  double lambda_start = 0.4; // IS exponent, annealed linearly over training
  double lambda_end = 1.0;
  double epsilon_p = 1e-3;   // keeps zero-TD-error items sampleable

  double lambda_at(double progress) const;
};

struct NetworkShape {
  int hidden1 = 128;
  int hidden2 = 128;      // plain nets only
  int head_hidden = 64;   // dueling heads only
};

struct AgentConfig {
  Variant variant = Variant::kDql;
  double gamma = 0.8;
  double lr = 0.2;
  EpsSchedule eps;
  int batch_size = 32;
  int capacity = 15000;
  int target_sync = 50;        // train steps between target-network copies
  double grad_clip_norm = 10.0;
  PerConfig per;
  NetworkShape shape;

  void validate() const;
};

// Prediction + target network pair.
struct QNetworkPair {
  nn::QNetwork prediction;
  nn::QNetwork target;
};

// With probability eps a uniformly random action, otherwise the greedy one
// (ties to the lowest index). eps = 0 consumes no randomness.
int epsilon_greedy(const nn::Vector& q_values, double eps, SplitMix64& rng);

// Bootstrapped targets y_j for a batch: terminal transitions yield y = r;
// otherwise the variant's rule (double decoupling for kDdql, the target-net
// max for the rest). Throws TrainingDiverged on non-finite network outputs.
nn::Vector compute_targets(std::span<const Transition> batch, const QNetworkPair& nets,
                           double gamma, Variant variant);

// |y - Q(s, a)| for a single transition.
double td_error(const Transition& t, const QNetworkPair& nets, double gamma, Variant variant);

// Max-normalized importance-sampling weights (1/(N P_i))^lambda.
nn::Vector is_weights(std::span<const double> probabilities, std::size_t buffer_size,
                      double lambda);

// Sum-tree-backed transition store with proportional sampling.
class PrioritizedReplay {
 public:
  PrioritizedReplay(std::size_t capacity, const PerConfig& cfg);

  // Stores with the current max leaf priority (1.0 into an empty buffer);
  // returns the leaf index used.
  std::size_t push(Transition t);

  struct Sample {
    std::vector<std::size_t> leaves;
    std::vector<double> probabilities;  // exact current P(i) per draw
  };

  // Stratified proportional sample: total mass split into k equal segments,
  // one uniform draw each. Throws on an empty or all-zero tree.
  Sample sample(std::size_t k, SplitMix64& rng) const;

  // priority <- (|td_error| + epsilon_p)^psi for each leaf.
  void update_priorities(std::span<const std::size_t> leaves,
                         std::span<const double> td_errors);

  const Transition& at_leaf(std::size_t leaf) const { return storage_[leaf]; }
  std::size_t size() const { return storage_.size(); }
  const SumTree& tree() const { return tree_; }

 private:
  PerConfig cfg_;
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  SumTree tree_;
  std::vector<Transition> storage_;
};

struct TrainStats {
  double loss = 0.0;
  double mean_abs_td = 0.0;  // over the batch, from pre-update residuals
};

// One DQN-family learner: replay storage, variant-specific targets, SGD
// updates with global-norm gradient clipping, periodic target syncs.
class Agent {
 public:
  Agent(const AgentConfig& cfg, int obs_dim, int action_count, SplitMix64& init_rng);

  int select_action(const nn::Vector& observation, double eps, SplitMix64& rng) const;
  void push(Transition t);

  // One SGD update from a sampled batch. Returns nothing while the buffer
  // holds fewer than batch_size transitions. `progress` in [0, 1] drives the
  // PER lambda anneal.
  std::optional<TrainStats> train_step(SplitMix64& rng, double progress);

  std::size_t buffer_size() const;
  std::int64_t train_steps() const { return train_steps_; }
  const AgentConfig& config() const { return cfg_; }
  const nn::QNetwork& prediction() const { return nets_.prediction; }
  const nn::QNetwork& target() const { return nets_.target; }
  void set_prediction(nn::QNetwork net);  // also re-syncs the target copy

 private:
  AgentConfig cfg_;
  QNetworkPair nets_;
  std::optional<UniformReplay> uniform_;
  std::optional<PrioritizedReplay> per_;
  std::int64_t train_steps_ = 0;
};

}  // namespace freeway::rl
