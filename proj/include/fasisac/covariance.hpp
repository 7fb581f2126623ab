#pragma once

#include <Eigen/Dense>
#include <optional>

namespace fasisac {

/// Transmit covariance U (Hermitian PSD, N x N) with an optional rank-one
/// factor u such that U = u u^H after randomization recovery.
struct Covariance {
  Eigen::MatrixXcd matrix;
  std::optional<Eigen::VectorXcd> rank_one_factor;

  int dim() const { return static_cast<int>(matrix.rows()); }
  double trace() const { return matrix.trace().real(); }

  static Covariance zero(int n) {
    return Covariance{Eigen::MatrixXcd::Zero(n, n), std::nullopt};
  }
  static Covariance from_factor(const Eigen::VectorXcd& u) {
    return Covariance{u * u.adjoint(), u};
  }
};

}  // namespace fasisac
