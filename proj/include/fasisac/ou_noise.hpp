#pragma once

#include <Eigen/Dense>

#include "fasisac/errors.hpp"
#include "fasisac/rng.hpp"

namespace fasisac {

// Mean-reverting exploration noise: Z <- Z + xi (0 - Z) + varsigma N(0, I),
// one independent component per action dimension.
class OuNoise {
 public:
  OuNoise(int dim, double xi, double varsigma)
      : xi_(xi), varsigma_(varsigma), state_(Eigen::VectorXd::Zero(dim)) {
    if (dim < 1) throw ConfigError("OuNoise: dimension must be >= 1");
    if (!(xi > 0.0) || xi > 1.0) throw ConfigError("OuNoise: xi must lie in (0, 1]");
    if (varsigma < 0.0) throw ConfigError("OuNoise: varsigma must be >= 0");
  }

  void reset() { state_.setZero(); }

  const Eigen::VectorXd& step(Rng& rng) {
    for (Eigen::Index i = 0; i < state_.size(); ++i) {
      state_(i) += xi_ * (0.0 - state_(i)) + varsigma_ * rng.normal();
    }
    return state_;
  }

  const Eigen::VectorXd& state() const { return state_; }
  double xi() const { return xi_; }
  double varsigma() const { return varsigma_; }
  void set_varsigma(double v) {
    if (v < 0.0) throw ConfigError("OuNoise: varsigma must be >= 0");
    varsigma_ = v;
  }

 private:
  double xi_;
  double varsigma_;
  Eigen::VectorXd state_;
};

}  // namespace fasisac
