#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fasisac/adam.hpp"
#include "fasisac/environment.hpp"
#include "fasisac/mlp.hpp"
#include "fasisac/ou_noise.hpp"
#include "fasisac/replay.hpp"
#include "fasisac/rng.hpp"

namespace fasisac {

struct DdpgConfig {
  int state_dim = 0;
  int action_dim = 0;
  double action_bound = 1.0;  // actor output scale and post-noise clip
  std::vector<int> actor_hidden = {400, 300};
  std::vector<int> critic_hidden = {400, 300};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double discount = 0.99;
  double tau = 0.001;
  int batch_size = 64;
  std::size_t buffer_capacity = 10000;
  int warmup = 1000;  // transitions stored before training starts
  double ou_xi = 0.15;
  double ou_sigma_start = 0.2;  // fraction of action_bound
  double ou_sigma_end = 0.02;   // annealed to linearly over a training run

  void validate() const;
};

struct TrainStepReport {
  bool trained = false;  // false: buffer below batch size, step was a no-op
  double critic_loss = 0.0;      // mean squared Bellman error of the batch
  double actor_objective = 0.0;  // mean critic value of the actor's actions
};

// Actor-critic pair with target copies, replay and soft target updates.
class DdpgAgent {
 public:
  DdpgAgent(const DdpgConfig& config, Rng& rng);

  // Deterministic policy action.
  Eigen::VectorXd act(const Eigen::VectorXd& state) const;
  // Exploration action: policy + one OU step, clipped to the action bound.
  Eigen::VectorXd act(const Eigen::VectorXd& state, OuNoise& noise, Rng& rng) const;

  void remember(Transition t) { buffer_.push(std::move(t)); }
  bool ready_to_train() const {
    return buffer_.size() >= static_cast<std::size_t>(
                                 std::max(config_.batch_size, config_.warmup));
  }

  // One mini-batch update of critic then actor, followed by soft target
  // updates. No-op (trained = false) while the buffer holds fewer than
  // batch_size transitions.
  TrainStepReport train_step(Rng& rng);

  const DdpgConfig& config() const { return config_; }
  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic_target() const { return critic_target_; }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_critic() { return critic_; }

  void save(const std::string& path) const;
  static DdpgAgent load(const std::string& path);

 private:
  DdpgAgent() = default;  // used by load()

  DdpgConfig config_;
  Mlp actor_, critic_, actor_target_, critic_target_;
  AdamState actor_opt_, critic_opt_;
  ReplayBuffer buffer_{10000};
};

struct EpisodeRow {
  int episode = 0;
  double total_return = 0.0;
  double mean_reward = 0.0;
  double final_rate = 0.0;
  Eigen::VectorXd final_sensing_slacks;  // gain_k - gamma at the last step
};

struct TrainResult {
  std::vector<EpisodeRow> log;
  AntennaLayout best_layout;  // layout of the highest-reward step seen
  double best_reward = 0.0;
  bool best_found = false;  // false iff no step was taken (episodes == 0)
};

// Standard interaction loop: act with OU noise, step the environment, store
// the transition, train once per step after warm-up. The OU scale anneals
// linearly from ou_sigma_start to ou_sigma_end (fractions of the action
// bound) over the run; noise state resets at each episode start. When
// episodes == 0 the environment's current layout is returned untouched.
TrainResult run_episodes(DdpgAgent& agent, Environment& env, int episodes,
                         int steps_per_episode, Rng& rng);

}  // namespace fasisac
