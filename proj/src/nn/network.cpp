#include "freeway/nn/network.hpp"

#include <cmath>
#include <string>

#include "freeway/errors.hpp"

namespace freeway::nn {
namespace {

void check_specs(std::span<const LayerSpec> specs, const char* what) {
  if (specs.empty()) throw InvalidInput(std::string(what) + " has no layers");
  for (size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].in_dim < 1 || specs[i].out_dim < 1)
      throw InvalidInput(std::string(what) + ": layer dims must be >= 1");
    if (i + 1 < specs.size() && specs[i].out_dim != specs[i + 1].in_dim)
      throw InvalidInput(std::string(what) + ": layer dims do not chain");
  }
  if (specs.back().activation != Activation::kLinear)
    throw InvalidInput(std::string(what) + ": final layer must be linear");
}

std::vector<DenseLayer> init_group(std::span<const LayerSpec> specs, SplitMix64& rng) {
  std::vector<DenseLayer> group;
  group.reserve(specs.size());
  for (const LayerSpec& spec : specs) {
    DenseLayer layer;
    layer.weights.resize(spec.out_dim, spec.in_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.in_dim));
    for (Eigen::Index r = 0; r < spec.out_dim; ++r)
      for (Eigen::Index c = 0; c < spec.in_dim; ++c)
        layer.weights(r, c) = rng.uniform(-bound, bound);
    layer.biases = Vector::Zero(spec.out_dim);
    layer.activation = spec.activation;
    group.push_back(std::move(layer));
  }
  return group;
}

// Forward through one layer stack; one column per sample. When `cache` is
// given it receives the input, pre-activations and activations of each layer.
Matrix group_forward(const std::vector<DenseLayer>& group, const Matrix& input,
                     ForwardCache* cache) {
  Matrix a = input;
  if (cache) {
    cache->activations.push_back(a);
  }
  for (const DenseLayer& layer : group) {
    Matrix z = (layer.weights * a).colwise() + layer.biases;
    a = layer.activation == Activation::kRelu ? z.cwiseMax(0.0) : z;
    if (cache) {
      cache->pre_activations.push_back(std::move(z));
      cache->activations.push_back(a);
    }
  }
  return a;
}

// Backward through one layer stack given d(loss)/d(output). Writes per-layer
// gradients and returns d(loss)/d(input).
Matrix group_backward(const std::vector<DenseLayer>& group, const ForwardCache& cache,
                      Matrix d_out, std::vector<LayerGrads>& grads) {
  grads.resize(group.size());
  for (int i = static_cast<int>(group.size()) - 1; i >= 0; --i) {
    const DenseLayer& layer = group[i];
    if (layer.activation == Activation::kRelu) {
      d_out = d_out.cwiseProduct(
          (cache.pre_activations[i].array() > 0.0).cast<double>().matrix());
    }
    grads[i].d_weights.noalias() = d_out * cache.activations[i].transpose();
    grads[i].d_biases = d_out.rowwise().sum();
    d_out = layer.weights.transpose() * d_out;
  }
  return d_out;
}

Eigen::Index argmax_lowest(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

void check_batch(const QNetwork& net, const Matrix& states, const Eigen::VectorXi& actions,
                 const Vector& targets, const Vector& sample_weights) {
  if (states.rows() != net.input_dim())
    throw InvalidInput("state dim " + std::to_string(states.rows()) + " != network input dim " +
                       std::to_string(net.input_dim()));
  const Eigen::Index batch = states.cols();
  if (actions.size() != batch || targets.size() != batch || sample_weights.size() != batch)
    throw InvalidInput("batch sizes differ");
  if (batch == 0) throw InvalidInput("empty batch");
  const Eigen::Index n_actions = net.action_count();
  for (Eigen::Index j = 0; j < batch; ++j) {
    if (actions(j) < 0 || actions(j) >= n_actions)
      throw InvalidInput("action index out of range");
    if (!std::isfinite(targets(j))) throw InvalidInput("non-finite target");
    if (!std::isfinite(sample_weights(j)) || sample_weights(j) < 0.0)
      throw InvalidInput("sample weight must be finite and >= 0");
  }
}

// Q-values for a batch with caches, plus the per-column advantage argmax for
// dueling nets (needed by the backward pass).
struct BatchForward {
  Matrix q;
  ForwardCache trunk_cache;
  ForwardCache value_cache;
  ForwardCache advantage_cache;
  std::vector<Eigen::Index> adv_argmax;
};

BatchForward batch_forward(const QNetwork& net, const Matrix& states) {
  BatchForward out;
  if (net.arch == Architecture::kPlain) {
    out.q = group_forward(net.layers, states, &out.trunk_cache);
    return out;
  }
  const Matrix t = group_forward(net.trunk, states, &out.trunk_cache);
  const Matrix v = group_forward(net.value, t, &out.value_cache);
  const Matrix a = group_forward(net.advantage, t, &out.advantage_cache);
  const Eigen::Index batch = states.cols();
  out.q.resize(a.rows(), batch);
  out.adv_argmax.resize(batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const Eigen::Index m = argmax_lowest(a.col(j));
    out.adv_argmax[j] = m;
    const double a_max = a(m, j);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.q(i, j) = v(0, j) + (a(i, j) - a_max);
  }
  return out;
}

double loss_only(const QNetwork& net, const Matrix& states, const Eigen::VectorXi& actions,
                 const Vector& targets, const Vector& sample_weights) {
  const Matrix q = q_values_batch(net, states);
  const Eigen::Index batch = states.cols();
  double loss = 0.0;
  for (Eigen::Index j = 0; j < batch; ++j) {
    const double e = targets(j) - q(actions(j), j);
    loss += sample_weights(j) * e * e;
  }
  return loss / static_cast<double>(batch);
}

template <typename Fn>
void for_each_param(QNetwork& net, Fn&& fn) {
  auto visit = [&](std::vector<DenseLayer>& group) {
    for (DenseLayer& layer : group) {
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) fn(layer.weights.data()[i]);
      for (Eigen::Index i = 0; i < layer.biases.size(); ++i) fn(layer.biases.data()[i]);
    }
  };
  visit(net.layers);
  visit(net.trunk);
  visit(net.value);
  visit(net.advantage);
}

std::vector<LayerGrads> zero_like(const std::vector<DenseLayer>& group) {
  std::vector<LayerGrads> grads(group.size());
  for (size_t i = 0; i < group.size(); ++i) {
    grads[i].d_weights = Matrix::Zero(group[i].out_dim(), group[i].in_dim());
    grads[i].d_biases = Vector::Zero(group[i].out_dim());
  }
  return grads;
}

}  // namespace

Eigen::Index QNetwork::input_dim() const {
  return arch == Architecture::kPlain ? layers.front().in_dim() : trunk.front().in_dim();
}

Eigen::Index QNetwork::action_count() const {
  return arch == Architecture::kPlain ? layers.back().out_dim() : advantage.back().out_dim();
}

QNetwork make_plain(std::span<const LayerSpec> layers, SplitMix64& rng) {
  check_specs(layers, "plain network");
  QNetwork net;
  net.arch = Architecture::kPlain;
  net.layers = init_group(layers, rng);
  return net;
}

QNetwork make_dueling(std::span<const LayerSpec> trunk, std::span<const LayerSpec> value,
                      std::span<const LayerSpec> advantage, SplitMix64& rng) {
  check_specs(trunk, "trunk");
  check_specs(value, "value head");
  check_specs(advantage, "advantage head");
  if (value.back().out_dim != 1) throw InvalidInput("value head must end in a single output");
  if (value.front().in_dim != trunk.back().out_dim ||
      advantage.front().in_dim != trunk.back().out_dim)
    throw InvalidInput("head input dims must match trunk output dim");
  QNetwork net;
  net.arch = Architecture::kDueling;
  net.trunk = init_group(trunk, rng);
  net.value = init_group(value, rng);
  net.advantage = init_group(advantage, rng);
  return net;
}

QNetwork copy_params(const QNetwork& src) { return src; }

Vector forward(const QNetwork& net, const Vector& state, ForwardCache* cache) {
  if (net.arch != Architecture::kPlain)
    throw ArchitectureMismatch("forward() requires a plain network");
  if (state.size() != net.input_dim())
    throw InvalidInput("state dim " + std::to_string(state.size()) + " != network input dim " +
                       std::to_string(net.input_dim()));
  return group_forward(net.layers, state, cache).col(0);
}

DuelingOut dueling_forward(const QNetwork& net, const Vector& state) {
  if (net.arch != Architecture::kDueling)
    throw ArchitectureMismatch("dueling_forward() requires a dueling network");
  if (state.size() != net.input_dim())
    throw InvalidInput("state dim " + std::to_string(state.size()) + " != network input dim " +
                       std::to_string(net.input_dim()));
  const BatchForward fwd = batch_forward(net, state);
  DuelingOut out;
  out.q = fwd.q.col(0);
  out.advantages = fwd.advantage_cache.activations.back().col(0);
  out.v = fwd.value_cache.activations.back()(0, 0);
  return out;
}

Vector q_values(const QNetwork& net, const Vector& state) {
  return net.arch == Architecture::kPlain ? forward(net, state) : dueling_forward(net, state).q;
}

Matrix q_values_batch(const QNetwork& net, const Matrix& states) {
  if (states.rows() != net.input_dim())
    throw InvalidInput("state dim " + std::to_string(states.rows()) + " != network input dim " +
                       std::to_string(net.input_dim()));
  return batch_forward(net, states).q;
}

double Gradients::squared_norm() const {
  double total = 0.0;
  auto add = [&](const std::vector<LayerGrads>& group) {
    for (const LayerGrads& g : group)
      total += g.d_weights.squaredNorm() + g.d_biases.squaredNorm();
  };
  add(layers);
  add(trunk);
  add(value);
  add(advantage);
  return total;
}

void Gradients::scale(double factor) {
  auto mul = [&](std::vector<LayerGrads>& group) {
    for (LayerGrads& g : group) {
      g.d_weights *= factor;
      g.d_biases *= factor;
    }
  };
  mul(layers);
  mul(trunk);
  mul(value);
  mul(advantage);
}

LossGrad loss_and_grad(const QNetwork& net, const Matrix& states, const Eigen::VectorXi& actions,
                       const Vector& targets, const Vector& sample_weights) {
  check_batch(net, states, actions, targets, sample_weights);
  const Eigen::Index batch = states.cols();
  const BatchForward fwd = batch_forward(net, states);

  LossGrad out;
  out.residuals.resize(batch);
  Matrix d_q = Matrix::Zero(net.action_count(), batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const double e = targets(j) - fwd.q(actions(j), j);
    out.residuals(j) = e;
    out.loss += sample_weights(j) * e * e;
    d_q(actions(j), j) = -2.0 * sample_weights(j) * e / static_cast<double>(batch);
  }
  out.loss /= static_cast<double>(batch);
  if (!std::isfinite(out.loss)) throw TrainingDiverged("non-finite loss");

  if (net.arch == Architecture::kPlain) {
    group_backward(net.layers, fwd.trunk_cache, std::move(d_q), out.grads.layers);
    return out;
  }

  // q(i,j) = v(j) + a(i,j) - a(m_j,j):  dv(j) = sum_i dq(i,j),
  // da(i,j) = dq(i,j) - [i == m_j] * dv(j).
  Matrix d_v(1, batch);
  Matrix d_a = d_q;
  for (Eigen::Index j = 0; j < batch; ++j) {
    const double col_sum = d_q.col(j).sum();
    d_v(0, j) = col_sum;
    d_a(fwd.adv_argmax[j], j) -= col_sum;
  }
  Matrix d_trunk = group_backward(net.value, fwd.value_cache, std::move(d_v), out.grads.value);
  d_trunk += group_backward(net.advantage, fwd.advantage_cache, std::move(d_a),
                            out.grads.advantage);
  group_backward(net.trunk, fwd.trunk_cache, std::move(d_trunk), out.grads.trunk);
  return out;
}

Gradients finite_diff_grad(const QNetwork& net, const Matrix& states,
                           const Eigen::VectorXi& actions, const Vector& targets,
                           const Vector& sample_weights, double step) {
  if (step <= 0.0) throw InvalidInput("finite-difference step must be > 0");
  check_batch(net, states, actions, targets, sample_weights);

  QNetwork probe = net;
  Gradients grads;
  grads.layers = zero_like(net.layers);
  grads.trunk = zero_like(net.trunk);
  grads.value = zero_like(net.value);
  grads.advantage = zero_like(net.advantage);

  // Flatten both the probe's parameters and the gradient slots in the same
  // order, then walk them together.
  std::vector<double*> params;
  for_each_param(probe, [&](double& p) { params.push_back(&p); });
  std::vector<double*> slots;
  auto collect = [&](std::vector<LayerGrads>& group) {
    for (LayerGrads& g : group) {
      for (Eigen::Index i = 0; i < g.d_weights.size(); ++i) slots.push_back(&g.d_weights.data()[i]);
      for (Eigen::Index i = 0; i < g.d_biases.size(); ++i) slots.push_back(&g.d_biases.data()[i]);
    }
  };
  collect(grads.layers);
  collect(grads.trunk);
  collect(grads.value);
  collect(grads.advantage);

  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + step;
    const double plus = loss_only(probe, states, actions, targets, sample_weights);
    *params[i] = saved - step;
    const double minus = loss_only(probe, states, actions, targets, sample_weights);
    *params[i] = saved;
    *slots[i] = (plus - minus) / (2.0 * step);
  }
  return grads;
}

void sgd_step(QNetwork& net, const Gradients& grads, double lr) {
  if (lr < 0.0) throw InvalidInput("learning rate must be >= 0");
  auto apply = [&](std::vector<DenseLayer>& group, const std::vector<LayerGrads>& g) {
    if (group.size() != g.size()) throw InvalidInput("gradient shape mismatch");
    for (size_t i = 0; i < group.size(); ++i) {
      if (g[i].d_weights.rows() != group[i].weights.rows() ||
          g[i].d_weights.cols() != group[i].weights.cols() ||
          g[i].d_biases.size() != group[i].biases.size())
        throw InvalidInput("gradient shape mismatch");
      group[i].weights -= lr * g[i].d_weights;
      group[i].biases -= lr * g[i].d_biases;
    }
  };
  apply(net.layers, grads.layers);
  apply(net.trunk, grads.trunk);
  apply(net.value, grads.value);
  apply(net.advantage, grads.advantage);
}

}  // namespace freeway::nn
