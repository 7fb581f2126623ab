#pragma once

#include <optional>
#include <vector>

#include "fasisac/beamforming.hpp"
#include "fasisac/ddpg.hpp"
#include "fasisac/environment.hpp"
#include "fasisac/scenario.hpp"

namespace fasisac {

struct BcdConfig {
  int num_bs = 4;
  int max_outer_iters = 10;
  double rate_tolerance = 1e-3;  // stop when one outer iteration improves less
  int ddpg_episodes = 10;        // positioning budget per outer iteration
  int steps_per_episode = 100;
  int randomization_samples = 50;
  SolverConfig solver;
  // Agent hyperparameters; state/action dimensions and the action bound are
  // overwritten from the environment.
  DdpgConfig agent;
  EnvConfig env;

  void validate() const;
};

struct BcdIteration {
  int iteration = 0;  // 0 is the initial solve at the grid layout
  double relaxed_rate = 0.0;
  std::optional<double> recovered_rate;
  std::vector<double> sensing_slacks;  // gain_k - gamma at the evaluated point
  double best_rate = 0.0;              // best-so-far after this iteration
  bool layout_adopted = false;
};

struct OptResult {
  AntennaLayout best_layout;
  Covariance best_covariance;  // rank-one whenever status is optimal
  double best_rate = 0.0;
  double relaxed_rate = 0.0;  // relaxed bound from the solve behind best_rate
  std::vector<BcdIteration> trace;
  SolveStatus status = SolveStatus::kOptimal;
  std::optional<Eigen::VectorXd> infeasibility_certificate;
  double certificate_bound = 0.0;
};

// Alternating optimization: solve the covariance at the current layout, then
// run DDPG episodes with that covariance fixed and adopt the best-reward
// layout if a fresh solve there stays feasible. The reported best-so-far
// (layout, covariance, rate) never regresses across outer iterations. The
// incoming rng is split into independent solver / agent-init / training
// streams, so the initial solve consumes exactly the same draws as
// fpa_baseline with the same rng.
OptResult optimize(const Scenario& scenario, const BcdConfig& config, Rng& rng);

// Fixed-position baseline: half-wavelength grid, one covariance solve plus
// randomization, no positioning.
OptResult fpa_baseline(const Scenario& scenario, const BcdConfig& config, Rng& rng);

}  // namespace fasisac
