#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fasisac/geometry.hpp"
#include "fasisac/rng.hpp"

namespace fasisac {

/// One random problem instance: path geometry, path gains and the physical
/// constants every module downstream consumes.
struct Scenario {
  PathAngles tx_angles;                   // D departure paths, BS -> UT
  PathAngles rx_angles;                   // I arrival paths at the UT
  std::vector<PathAngles> target_angles;  // K targets, P paths each
  Eigen::MatrixXcd sigma_matrix;          // I x D path response matrix
  double wavelength = 1.0;
  double noise_power = 1.0;
  double p_max = 1.0;
  double gamma = 0.0;  // sensing beampattern gain threshold
  double d_s = 0.5;    // minimum BS antenna spacing
  Region region_bs;
  Region region_ut;

  int num_tx_paths() const { return tx_angles.num_paths(); }
  int num_rx_paths() const { return rx_angles.num_paths(); }
  int num_targets() const { return static_cast<int>(target_angles.size()); }

  /// Side length of the movement region (regions are squares of side A).
  double region_side() const { return 2.0 * region_bs.half_width; }

  void validate() const;
};

struct ScenarioConfig {
  int num_tx_paths = 3;          // D
  int num_rx_paths = 3;          // I
  int num_targets = 2;           // K
  int paths_per_target = 3;      // P, never pinned by the setup; default D
  double rician_tau = 1.0;       // LoS/NLoS average power ratio
  double wavelength = 1.0;
  double noise_power = 1.0;
  double p_max = 1.0;
  double gamma = 0.0;
  double d_s = 0.5;              // lambda/2 by default
  double region_side = 4.0;      // A = 4 lambda by default
  bool diagonal_sigma = true;
};

/// Draws one scenario: all elevation/azimuth angles i.i.d. uniform on [0, pi];
/// diagonal Rician path response with var(Sigma_11) = tau/(tau+1) and
/// var(Sigma_dd) = 1/((tau+1)(D-1)) for d >= 2.
Scenario sample_scenario(Rng& rng, const ScenarioConfig& config);

}  // namespace fasisac
