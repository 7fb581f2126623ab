#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fasisac/channel.hpp"
#include "fasisac/covariance.hpp"
#include "fasisac/geometry.hpp"
#include "fasisac/rng.hpp"
#include "fasisac/scenario.hpp"

namespace fasisac {

// Penalty weights of the shaped reward.
struct RewardWeights {
  double alpha1 = 1.0;  // sensing-gain shortfall
  double alpha2 = 1.0;  // transmit-power excess
  double alpha3 = 0.1;  // movement cost
};

// kShortfall charges max(0, gamma - gain) and max(0, tr(U) - p_max): the
// intended "penalize violations" behavior and the default. kAsPrinted flips
// both maxima (charging constraint satisfaction) and exists only so the
// alternative reading of the reward definition stays auditable.
enum class RewardSignConvention { kShortfall, kAsPrinted };

enum class InitialLayoutPolicy { kFpaGrid, kRandomValid };

struct EnvConfig {
  RewardWeights weights;
  int episode_length = 100;
  RewardSignConvention sign_convention = RewardSignConvention::kShortfall;
  InitialLayoutPolicy initial_layout = InitialLayoutPolicy::kFpaGrid;
};

struct StepResult {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  double rate = 0.0;
  Eigen::VectorXd sensing_gains;       // one per target, at the new layout
  std::vector<bool> sensing_violated;  // gain_k < gamma
  bool power_violated = false;         // tr(U) > p_max
  bool done = false;
};

// State vector [x_1, y_1, ..., x_N, y_N, x_ut, y_ut, tr(U), lambda_max(U),
// mean eigenvalue]; spectral features come from a Hermitian eigensolve with
// eigenvalues clamped at zero. Length 2(N+1)+3.
Eigen::VectorXd build_state(const AntennaLayout& layout, const Covariance& covariance);

// Moves every antenna by its (clipped) action component. Per-component clip to
// [-bound, bound] with bound = A/4, then a componentwise clamp into the
// antenna's region. BS antennas are then settled in index order: a tentative
// position that comes within d_s of any other antenna's current position
// (already-settled ones at their new spots, later ones at their old spots) is
// rejected and that antenna stays put, so a spacing-feasible input layout can
// never produce an infeasible output. Throws ConfigError if the input layout
// already violates the spacing floor.
AntennaLayout apply_action(const AntennaLayout& layout, const Eigen::VectorXd& action,
                           const Scenario& scenario);

// r = rate(after) - alpha1 * sum_k shortfall_k - alpha2 * power_excess
//   - alpha3 * mean realized displacement, where `after` is the action applied
// to `layout` and displacements are the realized (post-clip, post-rejection)
// moves of all N+1 antennas.
double reward(const AntennaLayout& layout, const Covariance& covariance,
              const Scenario& scenario, const RewardWeights& weights,
              const Eigen::VectorXd& action,
              RewardSignConvention convention = RewardSignConvention::kShortfall);

// The positioning MDP: antenna layout evolves under bounded moves while the
// transmit covariance stays fixed for the whole episode.
class Environment {
 public:
  Environment(Scenario scenario, int num_bs, EnvConfig config = {});

  // Places the initial layout (per config policy), zeroes the step counter and
  // returns the initial state.
  Eigen::VectorXd reset(Rng& rng);

  // Fixed-within-episode covariance used by rate/reward/state features.
  void set_covariance(Covariance covariance);

  StepResult step(const Eigen::VectorXd& action);

  Eigen::VectorXd state() const { return build_state(layout_, covariance_); }
  const AntennaLayout& layout() const { return layout_; }
  const Covariance& covariance() const { return covariance_; }
  const Scenario& scenario() const { return scenario_; }
  const EnvConfig& config() const { return config_; }

  int num_bs() const { return num_bs_; }
  int state_dim() const { return 2 * (num_bs_ + 1) + 3; }
  int action_dim() const { return 2 * (num_bs_ + 1); }
  double action_bound() const { return scenario_.region_side() / 4.0; }

 private:
  Scenario scenario_;
  int num_bs_;
  EnvConfig config_;
  AntennaLayout layout_;
  Covariance covariance_;
  int steps_taken_ = 0;
};

}  // namespace fasisac
