#include "fasisac/scenario.hpp"

#include <cmath>

namespace fasisac {

namespace {
constexpr double kPi = 3.14159265358979323846;

PathAngles sample_angles(Rng& rng, int paths) {
  Eigen::VectorXd el(paths), az(paths);
  for (int i = 0; i < paths; ++i) el[i] = rng.uniform(0.0, kPi);
  for (int i = 0; i < paths; ++i) az[i] = rng.uniform(0.0, kPi);
  return PathAngles(std::move(el), std::move(az));
}
}  // namespace

void Scenario::validate() const {
  if (!(wavelength > 0.0) || !(noise_power > 0.0) || !(p_max > 0.0) || !(d_s > 0.0))
    throw ConfigError("Scenario: wavelength, noise_power, p_max, d_s must be > 0");
  if (gamma < 0.0) throw ConfigError("Scenario: gamma must be >= 0");
  if (sigma_matrix.rows() != num_rx_paths() || sigma_matrix.cols() != num_tx_paths())
    throw ConfigError("Scenario: sigma_matrix must be I x D");
  tx_angles.validate();
  rx_angles.validate();
  for (const auto& t : target_angles) t.validate();
}

Scenario sample_scenario(Rng& rng, const ScenarioConfig& config) {
  const int num_tx = config.num_tx_paths;
  const int num_rx = config.num_rx_paths;
  if (num_tx < 1 || num_rx < 1) throw ConfigError("sample_scenario: need D >= 1 and I >= 1");
  if (config.num_targets < 0) throw ConfigError("sample_scenario: K must be >= 0");
  if (config.paths_per_target < 1) throw ConfigError("sample_scenario: P must be >= 1");
  if (!(config.rician_tau > 0.0)) throw ConfigError("sample_scenario: rician tau must be > 0");
  if (config.diagonal_sigma && num_tx != num_rx)
    throw ConfigError("sample_scenario: diagonal sigma requires D == I");
  if (config.diagonal_sigma && num_tx == 1)
    throw ConfigError("sample_scenario: Rician variance split needs D >= 2");

  Scenario s;
  s.wavelength = config.wavelength;
  s.noise_power = config.noise_power;
  s.p_max = config.p_max;
  s.gamma = config.gamma;
  s.d_s = config.d_s;
  s.region_bs = Region(0.5 * config.region_side);
  s.region_ut = Region(0.5 * config.region_side);

  s.tx_angles = sample_angles(rng, num_tx);
  s.rx_angles = sample_angles(rng, num_rx);
  s.target_angles.reserve(config.num_targets);
  for (int k = 0; k < config.num_targets; ++k)
    s.target_angles.push_back(sample_angles(rng, config.paths_per_target));

  s.sigma_matrix = Eigen::MatrixXcd::Zero(num_rx, num_tx);
  if (config.diagonal_sigma) {
    const double tau = config.rician_tau;
    s.sigma_matrix(0, 0) = rng.complex_normal(tau / (tau + 1.0));
    const double nlos_var = 1.0 / ((tau + 1.0) * (num_tx - 1));
    for (int d = 1; d < num_tx; ++d) s.sigma_matrix(d, d) = rng.complex_normal(nlos_var);
  } else {
    // Full i.i.d. response with unit total average power.
    const double var = 1.0 / (num_rx * num_tx);
    for (int i = 0; i < num_rx; ++i)
      for (int d = 0; d < num_tx; ++d) s.sigma_matrix(i, d) = rng.complex_normal(var);
  }

  s.validate();
  return s;
}

}  // namespace fasisac
