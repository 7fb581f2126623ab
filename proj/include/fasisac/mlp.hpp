#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fasisac/rng.hpp"

namespace fasisac {

enum class OutputActivation { kLinear, kTanhScaled };

// Per-parameter gradients returned by Mlp::backward, shaped like the network,
// plus gradients with respect to the (batched) inputs.
struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd input;      // d(loss)/d(inputs), dim0 x batch
  Eigen::MatrixXd aux_input;  // d(loss)/d(aux inputs); empty when unused
};

// Activations recorded during a forward pass, consumed by backward().
struct ForwardCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd aux;
  std::vector<Eigen::MatrixXd> pre;   // affine outputs z_l, one per layer
  std::vector<Eigen::MatrixXd> post;  // activations a_l, one per layer
};

// Dense feed-forward network with ReLU hidden layers and either a linear or a
// scaled-tanh output. Inputs and activations are stored one sample per column
// so a whole mini-batch moves through as a single matrix product.
//
// When late_concat_dim > 0, an auxiliary vector is appended to the activations
// of the first hidden layer before the second affine layer (the critic feeds
// the action in there rather than at the input).
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_dims, OutputActivation output_activation,
      double output_scale = 1.0, int late_concat_dim = 0);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for hidden layers and
  // Uniform(-3e-3, 3e-3) for the final layer, weights and biases alike.
  void init_params(Rng& rng);

  // inputs: input_dim x batch. aux: late_concat_dim x batch, required iff the
  // network was built with late_concat_dim > 0. Returns output_dim x batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd* aux = nullptr,
                          ForwardCache* cache = nullptr) const;
  Eigen::VectorXd forward_vec(const Eigen::VectorXd& input,
                              const Eigen::VectorXd* aux = nullptr) const;

  // Exact reverse-mode gradients of sum_b <output_grad.col(b), output.col(b)>.
  // Callers encode loss scaling (e.g. 1/batch) in output_grad.
  MlpGradients backward(const ForwardCache& cache,
                        const Eigen::MatrixXd& output_grad) const;

  MlpGradients zero_gradients() const;

  int num_layers() const { return static_cast<int>(weights_.size()); }
  int input_dim() const { return layer_dims_.front(); }
  int output_dim() const { return layer_dims_.back(); }
  int aux_dim() const { return late_concat_dim_; }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  OutputActivation output_activation() const { return output_activation_; }
  double output_scale() const { return output_scale_; }

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

 private:
  int layer_input_dim(int layer) const;

  std::vector<int> layer_dims_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  OutputActivation output_activation_ = OutputActivation::kLinear;
  double output_scale_ = 1.0;
  int late_concat_dim_ = 0;
};

// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace fasisac
