#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "freeway/rng.hpp"

namespace freeway::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kRelu, kLinear };

struct LayerSpec {
  Eigen::Index in_dim = 0;
  Eigen::Index out_dim = 0;
  Activation activation = Activation::kLinear;
};

struct DenseLayer {
  Matrix weights;  // out_dim x in_dim, rows index outputs
  Vector biases;   // out_dim
  Activation activation = Activation::kLinear;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

enum class Architecture { kPlain, kDueling };

// Dense Q-network. Either a single stack of layers (plain) or a shared trunk
// feeding a scalar value head and a per-action advantage head (dueling).
struct QNetwork {
  Architecture arch = Architecture::kPlain;
  std::vector<DenseLayer> layers;  // plain only
  std::vector<DenseLayer> trunk;   // dueling only
  std::vector<DenseLayer> value;
  std::vector<DenseLayer> advantage;

  Eigen::Index input_dim() const;
  Eigen::Index action_count() const;
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] drawn row-major from
// `rng`, biases zero. The final layer of each stack must be linear.
QNetwork make_plain(std::span<const LayerSpec> layers, SplitMix64& rng);
QNetwork make_dueling(std::span<const LayerSpec> trunk,
                      std::span<const LayerSpec> value,
                      std::span<const LayerSpec> advantage, SplitMix64& rng);

// Deep copy used for target-network syncs. Mutating the source afterwards
// leaves the copy unchanged.
QNetwork copy_params(const QNetwork& src);

struct ForwardCache {
  // activations[0] is the input batch; activations[i+1] the output of layer i.
  std::vector<Matrix> activations;
  std::vector<Matrix> pre_activations;
};

// Plain-architecture forward pass for a single state. Rejects dueling nets.
Vector forward(const QNetwork& net, const Vector& state, ForwardCache* cache = nullptr);

struct DuelingOut {
  double v = 0.0;
  Vector advantages;
  Vector q;  // q[a] = v + (advantages[a] - max advantages)
};

// Dueling forward pass for a single state. Rejects plain nets.
DuelingOut dueling_forward(const QNetwork& net, const Vector& state);

// Architecture-dispatching Q evaluation; `states` has one column per sample.
Vector q_values(const QNetwork& net, const Vector& state);
Matrix q_values_batch(const QNetwork& net, const Matrix& states);

struct LayerGrads {
  Matrix d_weights;
  Vector d_biases;
};

// Partials with the same shape as the network they were taken from.
struct Gradients {
  std::vector<LayerGrads> layers;
  std::vector<LayerGrads> trunk;
  std::vector<LayerGrads> value;
  std::vector<LayerGrads> advantage;

  double squared_norm() const;
  void scale(double factor);
};

struct LossGrad {
  double loss = 0.0;
  Gradients grads;
  Vector residuals;  // y_j - Q(s_j, a_j; theta), one per sample
};

// Weighted mean squared TD loss over a batch:
//   loss = (1/B) sum_j w_j (y_j - Q(s_j, a_j; theta))^2
// Targets are treated as constants (semi-gradient); only the chosen action's
// output contributes per sample. Gradients are the exact analytic partials.
LossGrad loss_and_grad(const QNetwork& net, const Matrix& states,
                       const Eigen::VectorXi& actions, const Vector& targets,
                       const Vector& sample_weights);

// Central-difference estimate of the same loss; test oracle for the analytic
// gradients.
Gradients finite_diff_grad(const QNetwork& net, const Matrix& states,
                           const Eigen::VectorXi& actions, const Vector& targets,
                           const Vector& sample_weights, double step);

// Pure descent: every parameter p <- p - lr * g.
void sgd_step(QNetwork& net, const Gradients& grads, double lr);

}  // namespace freeway::nn
