#include "fasisac/mlp.hpp"

#include <cmath>
#include <string>

#include "fasisac/errors.hpp"

namespace fasisac {
namespace {

void fill_uniform(Eigen::MatrixXd& m, Rng& rng, double lo, double hi) {
  for (double* p = m.data(); p != m.data() + m.size(); ++p) {
    *p = lo + (hi - lo) * rng.uniform01();
  }
}

void fill_uniform(Eigen::VectorXd& v, Rng& rng, double lo, double hi) {
  for (double* p = v.data(); p != v.data() + v.size(); ++p) {
    *p = lo + (hi - lo) * rng.uniform01();
  }
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_dims, OutputActivation output_activation,
         double output_scale, int late_concat_dim)
    : layer_dims_(std::move(layer_dims)),
      output_activation_(output_activation),
      output_scale_(output_scale),
      late_concat_dim_(late_concat_dim) {
  if (layer_dims_.size() < 2) {
    throw ConfigError("Mlp needs at least an input and an output dimension");
  }
  for (int d : layer_dims_) {
    if (d < 1) throw ConfigError("Mlp layer dimensions must be >= 1");
  }
  if (late_concat_dim_ < 0) throw ConfigError("late_concat_dim must be >= 0");
  if (late_concat_dim_ > 0 && layer_dims_.size() < 3) {
    throw ConfigError("late concat requires at least two affine layers");
  }
  const int n = static_cast<int>(layer_dims_.size()) - 1;
  weights_.resize(n);
  biases_.resize(n);
  for (int l = 0; l < n; ++l) {
    weights_[l] = Eigen::MatrixXd::Zero(layer_dims_[l + 1], layer_input_dim(l));
    biases_[l] = Eigen::VectorXd::Zero(layer_dims_[l + 1]);
  }
}

int Mlp::layer_input_dim(int layer) const {
  int dim = layer_dims_[layer];
  if (layer == 1 && late_concat_dim_ > 0) dim += late_concat_dim_;
  return dim;
}

void Mlp::init_params(Rng& rng) {
  const int n = num_layers();
  for (int l = 0; l < n; ++l) {
    double bound;
    if (l == n - 1) {
      bound = 3e-3;
    } else {
      bound = 1.0 / std::sqrt(static_cast<double>(layer_input_dim(l)));
    }
    fill_uniform(weights_[l], rng, -bound, bound);
    fill_uniform(biases_[l], rng, -bound, bound);
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd* aux,
                             ForwardCache* cache) const {
  if (inputs.rows() != input_dim()) {
    throw ConfigError("Mlp::forward input has " + std::to_string(inputs.rows()) +
                      " rows, expected " + std::to_string(input_dim()));
  }
  if (late_concat_dim_ > 0) {
    if (aux == nullptr) throw ConfigError("Mlp::forward requires aux inputs");
    if (aux->rows() != late_concat_dim_ || aux->cols() != inputs.cols()) {
      throw ConfigError("Mlp::forward aux inputs have wrong shape");
    }
  } else if (aux != nullptr) {
    throw ConfigError("Mlp::forward given aux inputs but has no concat layer");
  }

  const int n = num_layers();
  if (cache != nullptr) {
    cache->input = inputs;
    cache->aux = (aux != nullptr) ? *aux : Eigen::MatrixXd();
    cache->pre.assign(n, Eigen::MatrixXd());
    cache->post.assign(n, Eigen::MatrixXd());
  }

  Eigen::MatrixXd act = inputs;
  for (int l = 0; l < n; ++l) {
    if (l == 1 && late_concat_dim_ > 0) {
      Eigen::MatrixXd joined(act.rows() + late_concat_dim_, act.cols());
      joined.topRows(act.rows()) = act;
      joined.bottomRows(late_concat_dim_) = *aux;
      act = std::move(joined);
    }
    Eigen::MatrixXd z = (weights_[l] * act).colwise() + biases_[l];
    if (l < n - 1) {
      act = z.cwiseMax(0.0);
    } else if (output_activation_ == OutputActivation::kTanhScaled) {
      act = output_scale_ * z.array().tanh();
    } else {
      act = z;
    }
    if (cache != nullptr) {
      cache->pre[l] = std::move(z);
      cache->post[l] = act;
    }
  }
  return act;
}

Eigen::VectorXd Mlp::forward_vec(const Eigen::VectorXd& input,
                                 const Eigen::VectorXd* aux) const {
  if (aux != nullptr) {
    Eigen::MatrixXd a = *aux;
    return forward(input, &a);
  }
  return forward(input);
}

MlpGradients Mlp::backward(const ForwardCache& cache,
                           const Eigen::MatrixXd& output_grad) const {
  const int n = num_layers();
  if (static_cast<int>(cache.pre.size()) != n ||
      static_cast<int>(cache.post.size()) != n ||
      cache.input.rows() != input_dim()) {
    throw ConfigError("Mlp::backward cache does not match this network");
  }
  if (output_grad.rows() != output_dim() ||
      output_grad.cols() != cache.input.cols()) {
    throw ConfigError("Mlp::backward output_grad has wrong shape");
  }

  MlpGradients grads;
  grads.weights.resize(n);
  grads.biases.resize(n);

  // Gradient w.r.t. the affine output of the last layer.
  Eigen::MatrixXd g;
  if (output_activation_ == OutputActivation::kTanhScaled) {
    Eigen::ArrayXXd t = cache.pre[n - 1].array().tanh();
    g = output_grad.array() * output_scale_ * (1.0 - t.square());
  } else {
    g = output_grad;
  }

  for (int l = n - 1; l >= 0; --l) {
    // Input that fed layer l (post-concat for the injection layer).
    Eigen::MatrixXd layer_in;
    if (l == 0) {
      layer_in = cache.input;
    } else if (l == 1 && late_concat_dim_ > 0) {
      layer_in.resize(cache.post[0].rows() + late_concat_dim_,
                      cache.post[0].cols());
      layer_in.topRows(cache.post[0].rows()) = cache.post[0];
      layer_in.bottomRows(late_concat_dim_) = cache.aux;
    } else {
      layer_in = cache.post[l - 1];
    }

    grads.weights[l] = g * layer_in.transpose();
    grads.biases[l] = g.rowwise().sum();

    Eigen::MatrixXd g_in = weights_[l].transpose() * g;
    if (l == 1 && late_concat_dim_ > 0) {
      grads.aux_input = g_in.bottomRows(late_concat_dim_);
      g_in = g_in.topRows(cache.post[0].rows()).eval();
    }
    if (l == 0) {
      grads.input = std::move(g_in);
    } else {
      // ReLU mask from the previous layer's affine output.
      g = (cache.pre[l - 1].array() > 0.0)
              .select(g_in, Eigen::MatrixXd::Zero(g_in.rows(), g_in.cols()));
    }
  }
  return grads;
}

MlpGradients Mlp::zero_gradients() const {
  MlpGradients grads;
  grads.weights.reserve(weights_.size());
  grads.biases.reserve(biases_.size());
  for (const auto& w : weights_) {
    grads.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : biases_) {
    grads.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  }
  return grads;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.layer_dims() != online.layer_dims() ||
      target.aux_dim() != online.aux_dim()) {
    throw ConfigError("soft_update: network shapes differ");
  }
  for (int l = 0; l < target.num_layers(); ++l) {
    target.weights()[l] = tau * online.weights()[l] + (1.0 - tau) * target.weights()[l];
    target.biases()[l] = tau * online.biases()[l] + (1.0 - tau) * target.biases()[l];
  }
}

}  // namespace fasisac
