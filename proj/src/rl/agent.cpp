#include "freeway/rl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "freeway/errors.hpp"

namespace freeway::rl {
namespace {

using nn::Matrix;
using nn::Vector;

Eigen::Index argmax_lowest(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kDql: return "dql";
    case Variant::kDdql: return "ddql";
    case Variant::kDueling: return "dueling";
    case Variant::kPer: return "per";
  }
  return "dql";
}

Variant variant_from_string(const std::string& name) {
  if (name == "dql") return Variant::kDql;
  if (name == "ddql") return Variant::kDdql;
  if (name == "dueling") return Variant::kDueling;
  if (name == "per") return Variant::kPer;
  throw InvalidInput("unknown variant '" + name + "' (expected dql|ddql|dueling|per)");
}

double EpsSchedule::at(std::int64_t step, std::int64_t total_steps) const {
  const double decay_steps = decay_fraction * static_cast<double>(total_steps);
  if (decay_steps <= 0.0) return end;
  const double f = std::min(1.0, static_cast<double>(step) / decay_steps);
  return start + (end - start) * f;
}

double PerConfig::lambda_at(double progress) const {
  const double f = std::clamp(progress, 0.0, 1.0);
  return lambda_start + (lambda_end - lambda_start) * f;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("gamma must be in [0, 1)");
  if (lr < 0.0) throw InvalidInput("lr must be >= 0");
  if (batch_size < 1) throw InvalidInput("batch_size must be >= 1");
  if (capacity < batch_size) throw InvalidInput("capacity must be >= batch_size");
  if (target_sync < 1) throw InvalidInput("target_sync must be >= 1");
  if (eps.start < 0.0 || eps.start > 1.0 || eps.end < 0.0 || eps.end > 1.0)
    throw InvalidInput("epsilon bounds must be in [0, 1]");
  if (grad_clip_norm <= 0.0) throw InvalidInput("grad_clip_norm must be > 0");
  if (per.psi < 0.0) throw InvalidInput("per.psi must be >= 0");
  if (per.lambda_start < 0.0 || per.lambda_start > 1.0 || per.lambda_end < 0.0 ||
      per.lambda_end > 1.0)
    throw InvalidInput("per.lambda must be in [0, 1]");
  if (per.epsilon_p <= 0.0) throw InvalidInput("per.epsilon_p must be > 0");
  if (shape.hidden1 < 1 || shape.hidden2 < 1 || shape.head_hidden < 1)
    throw InvalidInput("network shape dims must be >= 1");
}

int epsilon_greedy(const Vector& q_values, double eps, SplitMix64& rng) {
  if (q_values.size() == 0) throw InvalidInput("epsilon_greedy on empty q-values");
  if (eps < 0.0 || eps > 1.0) throw InvalidInput("epsilon must be in [0, 1]");
  if (eps > 0.0 && rng.next_double() < eps)
    return rng.next_below(static_cast<int>(q_values.size()));
  return static_cast<int>(argmax_lowest(q_values));
}

Vector compute_targets(std::span<const Transition> batch, const QNetworkPair& nets, double gamma,
                       Variant variant) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  Vector targets(n);

  // Gather non-terminal next states into one batch forward pass.
  std::vector<Eigen::Index> live;
  for (Eigen::Index j = 0; j < n; ++j)
    if (!batch[j].terminal) live.push_back(j);

  Matrix bootstrap;  // q-values of the target net at s', one column per live row
  Matrix selector;   // ddql: prediction-net q-values at s'
  if (!live.empty()) {
    Matrix next_states(nets.prediction.input_dim(), static_cast<Eigen::Index>(live.size()));
    for (size_t c = 0; c < live.size(); ++c) next_states.col(c) = batch[live[c]].next_state;
    bootstrap = nn::q_values_batch(nets.target, next_states);
    if (variant == Variant::kDdql) selector = nn::q_values_batch(nets.prediction, next_states);
    if (!bootstrap.allFinite() || (variant == Variant::kDdql && !selector.allFinite()))
      throw TrainingDiverged("non-finite network output while computing targets");
  }

  for (Eigen::Index j = 0; j < n; ++j) targets(j) = batch[j].reward;
  for (size_t c = 0; c < live.size(); ++c) {
    const Eigen::Index j = live[c];
    double future;
    if (variant == Variant::kDdql) {
      const Eigen::Index pick = argmax_lowest(selector.col(c));
      future = bootstrap(pick, c);
    } else {
      future = bootstrap.col(c).maxCoeff();
    }
    targets(j) = batch[j].reward + gamma * future;
  }
  return targets;
}

double td_error(const Transition& t, const QNetworkPair& nets, double gamma, Variant variant) {
  const Vector y = compute_targets(std::span<const Transition>(&t, 1), nets, gamma, variant);
  const Vector q = nn::q_values(nets.prediction, t.state);
  return std::abs(y(0) - q(t.action));
}

Vector is_weights(std::span<const double> probabilities, std::size_t buffer_size, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw InvalidInput("lambda must be in [0, 1]");
  const Eigen::Index n = static_cast<Eigen::Index>(probabilities.size());
  if (n == 0) throw InvalidInput("is_weights on empty batch");
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(probabilities[i] > 0.0)) throw InvalidInput("sampling probabilities must be > 0");
    w(i) = std::pow(1.0 / (static_cast<double>(buffer_size) * probabilities[i]), lambda);
  }
  return w / w.maxCoeff();
}

PrioritizedReplay::PrioritizedReplay(std::size_t capacity, const PerConfig& cfg)
    : cfg_(cfg), capacity_(capacity), tree_(capacity) {
  if (capacity == 0) throw InvalidInput("replay capacity must be >= 1");
  storage_.reserve(capacity);
}

std::size_t PrioritizedReplay::push(Transition t) {
  const double priority = storage_.empty() ? 1.0 : tree_.max_priority();
  std::size_t leaf;
  if (storage_.size() < capacity_) {
    leaf = storage_.size();
    storage_.push_back(std::move(t));
  } else {
    leaf = cursor_;
    storage_[leaf] = std::move(t);
  }
  cursor_ = (leaf + 1) % capacity_;
  tree_.set(leaf, priority);
  return leaf;
}

PrioritizedReplay::Sample PrioritizedReplay::sample(std::size_t k, SplitMix64& rng) const {
  if (storage_.empty()) throw InvalidInput("sampling from an empty replay buffer");
  const double total = tree_.total();
  if (!(total > 0.0)) throw InvalidInput("degenerate priority distribution: total mass is 0");
  Sample out;
  out.leaves.resize(k);
  out.probabilities.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double u = (static_cast<double>(j) + rng.next_double()) * total / static_cast<double>(k);
    const std::size_t leaf = tree_.descend(std::min(u, std::nextafter(total, 0.0)));
    out.leaves[j] = leaf;
    out.probabilities[j] = tree_.priority(leaf) / total;
  }
  return out;
}

void PrioritizedReplay::update_priorities(std::span<const std::size_t> leaves,
                                          std::span<const double> td_errors) {
  if (leaves.size() != td_errors.size()) throw InvalidInput("leaf/priority count mismatch");
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i] >= storage_.size()) throw InvalidInput("priority update on an empty leaf");
    tree_.set(leaves[i], std::pow(std::abs(td_errors[i]) + cfg_.epsilon_p, cfg_.psi));
  }
}

Agent::Agent(const AgentConfig& cfg, int obs_dim, int action_count, SplitMix64& init_rng)
    : cfg_(cfg) {
  cfg_.validate();
  if (obs_dim < 1 || action_count < 1) throw InvalidInput("bad observation/action dims");

  using nn::Activation;
  using nn::LayerSpec;
  if (cfg.variant == Variant::kDueling) {
    const LayerSpec trunk[] = {{obs_dim, cfg.shape.hidden1, Activation::kRelu}};
    const LayerSpec value[] = {{cfg.shape.hidden1, cfg.shape.head_hidden, Activation::kRelu},
                               {cfg.shape.head_hidden, 1, Activation::kLinear}};
    const LayerSpec advantage[] = {{cfg.shape.hidden1, cfg.shape.head_hidden, Activation::kRelu},
                                   {cfg.shape.head_hidden, action_count, Activation::kLinear}};
    nets_.prediction = nn::make_dueling(trunk, value, advantage, init_rng);
  } else {
    const LayerSpec layers[] = {{obs_dim, cfg.shape.hidden1, Activation::kRelu},
                                {cfg.shape.hidden1, cfg.shape.hidden2, Activation::kRelu},
                                {cfg.shape.hidden2, action_count, Activation::kLinear}};
    nets_.prediction = nn::make_plain(layers, init_rng);
  }
  nets_.target = nn::copy_params(nets_.prediction);

  if (cfg.variant == Variant::kPer)
    per_.emplace(static_cast<std::size_t>(cfg.capacity), cfg.per);
  else
    uniform_.emplace(static_cast<std::size_t>(cfg.capacity));
}

int Agent::select_action(const Vector& observation, double eps, SplitMix64& rng) const {
  return epsilon_greedy(nn::q_values(nets_.prediction, observation), eps, rng);
}

void Agent::push(Transition t) {
  if (per_)
    per_->push(std::move(t));
  else
    uniform_->push(std::move(t));
}

std::size_t Agent::buffer_size() const { return per_ ? per_->size() : uniform_->size(); }

void Agent::set_prediction(nn::QNetwork net) {
  nets_.prediction = std::move(net);
  nets_.target = nn::copy_params(nets_.prediction);
}

std::optional<TrainStats> Agent::train_step(SplitMix64& rng, double progress) {
  const std::size_t batch_size = static_cast<std::size_t>(cfg_.batch_size);
  if (buffer_size() < batch_size) return std::nullopt;

  std::vector<Transition> batch;
  batch.reserve(batch_size);
  std::vector<std::size_t> leaves;
  Vector weights = Vector::Ones(static_cast<Eigen::Index>(batch_size));

  if (per_) {
    PrioritizedReplay::Sample sample = per_->sample(batch_size, rng);
    leaves = std::move(sample.leaves);
    for (const std::size_t leaf : leaves) batch.push_back(per_->at_leaf(leaf));
    weights = is_weights(sample.probabilities, per_->size(), cfg_.per.lambda_at(progress));
  } else {
    for (const std::size_t i : uniform_->sample_indices(batch_size, rng))
      batch.push_back(uniform_->at(i));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(batch_size);
  Matrix states(nets_.prediction.input_dim(), n);
  Eigen::VectorXi actions(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    states.col(j) = batch[j].state;
    actions(j) = batch[j].action;
  }
  const Vector targets = compute_targets(batch, nets_, cfg_.gamma, cfg_.variant);

  nn::LossGrad lg = nn::loss_and_grad(nets_.prediction, states, actions, targets, weights);

  if (per_) {
    std::vector<double> deltas(batch_size);
    for (std::size_t j = 0; j < batch_size; ++j)
      deltas[j] = std::abs(lg.residuals(static_cast<Eigen::Index>(j)));
    per_->update_priorities(leaves, deltas);
  }

  const double norm = std::sqrt(lg.grads.squared_norm());
  if (norm > cfg_.grad_clip_norm) lg.grads.scale(cfg_.grad_clip_norm / norm);
  nn::sgd_step(nets_.prediction, lg.grads, cfg_.lr);

  ++train_steps_;
  if (train_steps_ % cfg_.target_sync == 0) nets_.target = nn::copy_params(nets_.prediction);

  return TrainStats{lg.loss, lg.residuals.cwiseAbs().mean()};
}

}  // namespace freeway::rl
