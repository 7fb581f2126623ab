#pragma once

#include <Eigen/Dense>

#include "fasisac/covariance.hpp"
#include "fasisac/geometry.hpp"
#include "fasisac/scenario.hpp"

namespace fasisac {

/// Far-field path-length variation of an antenna at `position` relative to the
/// array origin, for one path: x sin(theta) cos(psi) + y cos(theta).
double propagation_delta(const Vec2& position, double elevation, double azimuth);

/// Unit-modulus steering phases of one antenna across all paths of `angles`.
Eigen::VectorXcd response_vector(const Vec2& position, const PathAngles& angles,
                                 double wavelength);

/// Paths x antennas response matrix; column n is response_vector(p_n).
/// Serves both the BS->UT matrix and the per-target matrices (same positions,
/// per-target angle sets).
Eigen::MatrixXcd response_matrix(const Eigen::Matrix2Xd& positions, const PathAngles& angles,
                                 double wavelength);

/// End-to-end 1 x N channel f(q)^H Sigma E(p).
Eigen::RowVectorXcd channel_vector(const AntennaLayout& layout, const Scenario& scenario);

/// (U + U^H) / 2.
Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& u);

/// log2(1 + f U f^H / sigma^2). Throws NumericalError when the quadratic form
/// is negative beyond tolerance or carries a large imaginary residue.
double communication_rate(const Eigen::RowVectorXcd& channel, const Covariance& covariance,
                          double noise_power);

/// Sensing beampattern gain Tr(E_k U E_k^H) toward one target; tiny negative
/// values from roundoff are clamped to zero.
double sensing_gain(const Eigen::MatrixXcd& target_matrix, const Covariance& covariance);

/// Response matrices toward every sensing target at the given BS positions.
std::vector<Eigen::MatrixXcd> target_matrices(const AntennaLayout& layout,
                                              const Scenario& scenario);

}  // namespace fasisac
