#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fasisac/errors.hpp"
#include "fasisac/mlp.hpp"

namespace fasisac {

// Bias-corrected adaptive-moment optimizer state for one Mlp. Moments mirror
// the network's weight/bias shapes.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;

  AdamState() = default;
  AdamState(const Mlp& net, double lr) : learning_rate(lr) {
    for (const auto& w : net.weights()) {
      m_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
      v_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : net.biases()) {
      m_biases.push_back(Eigen::VectorXd::Zero(b.size()));
      v_biases.push_back(Eigen::VectorXd::Zero(b.size()));
    }
  }
};

namespace detail {

template <typename Mat>
void adam_update_one(Mat& param, const Mat& grad, Mat& m, Mat& v,
                     const AdamState& st, double bc1, double bc2) {
  m = st.beta1 * m + (1.0 - st.beta1) * grad;
  v = st.beta2 * v + (1.0 - st.beta2) * grad.cwiseProduct(grad);
  param.array() -= st.learning_rate * (m.array() / bc1) /
                   ((v.array() / bc2).sqrt() + st.epsilon);
}

}  // namespace detail

// One optimizer step on all parameters of `net` using `grads`.
inline void adam_step(AdamState& st, Mlp& net, const MlpGradients& grads) {
  const auto n = net.weights().size();
  if (grads.weights.size() != n || st.m_weights.size() != n) {
    throw ConfigError("adam_step: shape mismatch between state, net, grads");
  }
  st.step_count += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
  for (std::size_t l = 0; l < n; ++l) {
    detail::adam_update_one(net.weights()[l], grads.weights[l], st.m_weights[l],
                            st.v_weights[l], st, bc1, bc2);
    detail::adam_update_one(net.biases()[l], grads.biases[l], st.m_biases[l],
                            st.v_biases[l], st, bc1, bc2);
  }
}

}  // namespace fasisac
