#include "fasisac/channel.hpp"

#include <cmath>
#include <complex>

#include "fasisac/errors.hpp"

namespace fasisac {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double propagation_delta(const Vec2& position, double elevation, double azimuth) {
  return position.x() * std::sin(elevation) * std::cos(azimuth) +
         position.y() * std::cos(elevation);
}

Eigen::VectorXcd response_vector(const Vec2& position, const PathAngles& angles,
                                 double wavelength) {
  if (!(wavelength > 0.0)) throw ConfigError("response_vector: wavelength must be > 0");
  const int paths = angles.num_paths();
  Eigen::VectorXcd v(paths);
  for (int d = 0; d < paths; ++d) {
    const double phase =
        kTwoPi * propagation_delta(position, angles.elevation[d], angles.azimuth[d]) / wavelength;
    v[d] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return v;
}

Eigen::MatrixXcd response_matrix(const Eigen::Matrix2Xd& positions, const PathAngles& angles,
                                 double wavelength) {
  const int n = static_cast<int>(positions.cols());
  if (n == 0) throw ConfigError("response_matrix: need at least one antenna");
  Eigen::MatrixXcd m(angles.num_paths(), n);
  for (int i = 0; i < n; ++i) m.col(i) = response_vector(positions.col(i), angles, wavelength);
  return m;
}

Eigen::RowVectorXcd channel_vector(const AntennaLayout& layout, const Scenario& scenario) {
  const Eigen::MatrixXcd& sigma = scenario.sigma_matrix;
  if (sigma.rows() != scenario.num_rx_paths() || sigma.cols() != scenario.num_tx_paths())
    throw ConfigError("channel_vector: sigma_matrix is not I x D");
  const Eigen::VectorXcd rx =
      response_vector(layout.ut_position, scenario.rx_angles, scenario.wavelength);
  const Eigen::MatrixXcd tx =
      response_matrix(layout.bs_positions, scenario.tx_angles, scenario.wavelength);
  return rx.adjoint() * sigma * tx;
}

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& u) { return 0.5 * (u + u.adjoint()); }

double communication_rate(const Eigen::RowVectorXcd& channel, const Covariance& covariance,
                          double noise_power) {
  if (!(noise_power > 0.0)) throw ConfigError("communication_rate: noise power must be > 0");
  if (covariance.dim() != channel.size())
    throw ConfigError("communication_rate: channel/covariance dimension mismatch");
  const Eigen::MatrixXcd u = hermitize(covariance.matrix);
  const std::complex<double> q = (channel * u * channel.adjoint()).value();
  if (std::abs(q.imag()) > 1e-9 * std::max(1.0, std::abs(q.real())))
    throw NumericalError("communication_rate: quadratic form has a large imaginary residue");
  double snr_term = q.real() / noise_power;
  if (snr_term < 0.0) {
    if (snr_term < -1e-9) throw NumericalError("communication_rate: negative quadratic form");
    snr_term = 0.0;
  }
  return std::log2(1.0 + snr_term);
}

double sensing_gain(const Eigen::MatrixXcd& target_matrix, const Covariance& covariance) {
  if (target_matrix.cols() != covariance.dim())
    throw ConfigError("sensing_gain: target matrix column count must equal covariance dim");
  const Eigen::MatrixXcd u = hermitize(covariance.matrix);
  const double gain = (target_matrix * u * target_matrix.adjoint()).trace().real();
  if (gain < 0.0) {
    if (gain < -1e-9 * std::max(1.0, u.trace().real()))
      throw NumericalError("sensing_gain: trace came out negative");
    return 0.0;
  }
  return gain;
}

std::vector<Eigen::MatrixXcd> target_matrices(const AntennaLayout& layout,
                                              const Scenario& scenario) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(scenario.target_angles.size());
  for (const auto& angles : scenario.target_angles)
    out.push_back(response_matrix(layout.bs_positions, angles, scenario.wavelength));
  return out;
}

}  // namespace fasisac
