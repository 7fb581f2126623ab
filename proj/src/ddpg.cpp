#include "fasisac/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "fasisac/checkpoint.hpp"
#include "fasisac/errors.hpp"

namespace fasisac {
namespace {

std::vector<int> layer_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.reserve(hidden.size() + 2);
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

void DdpgConfig::validate() const {
  if (state_dim < 1 || action_dim < 1) {
    throw ConfigError("DdpgConfig: state_dim and action_dim must be >= 1");
  }
  if (!(action_bound > 0.0)) throw ConfigError("DdpgConfig: action_bound must be > 0");
  if (actor_hidden.empty() || critic_hidden.empty()) {
    throw ConfigError("DdpgConfig: need at least one hidden layer");
  }
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw ConfigError("DdpgConfig: learning rates must be > 0");
  }
  if (discount < 0.0 || discount >= 1.0) {
    throw ConfigError("DdpgConfig: discount must lie in [0, 1)");
  }
  if (!(tau > 0.0) || tau > 1.0) throw ConfigError("DdpgConfig: tau must lie in (0, 1]");
  if (batch_size < 1) throw ConfigError("DdpgConfig: batch_size must be >= 1");
  if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
    throw ConfigError("DdpgConfig: buffer capacity below batch size");
  }
  if (warmup < 0) throw ConfigError("DdpgConfig: warmup must be >= 0");
  if (!(ou_xi > 0.0) || ou_xi > 1.0) throw ConfigError("DdpgConfig: ou_xi must lie in (0, 1]");
  if (ou_sigma_start < 0.0 || ou_sigma_end < 0.0) {
    throw ConfigError("DdpgConfig: OU scales must be >= 0");
  }
}

DdpgAgent::DdpgAgent(const DdpgConfig& config, Rng& rng)
    : config_(config), buffer_(config.buffer_capacity) {
  config_.validate();
  actor_ = Mlp(layer_dims(config_.state_dim, config_.actor_hidden, config_.action_dim),
               OutputActivation::kTanhScaled, config_.action_bound);
  critic_ = Mlp(layer_dims(config_.state_dim, config_.critic_hidden, 1),
                OutputActivation::kLinear, 1.0, config_.action_dim);
  actor_.init_params(rng);
  critic_.init_params(rng);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = AdamState(actor_, config_.actor_lr);
  critic_opt_ = AdamState(critic_, config_.critic_lr);
}

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd& state) const {
  return actor_.forward_vec(state);
}

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd& state, OuNoise& noise, Rng& rng) const {
  Eigen::VectorXd a = actor_.forward_vec(state) + noise.step(rng);
  return a.cwiseMax(-config_.action_bound).cwiseMin(config_.action_bound);
}

TrainStepReport DdpgAgent::train_step(Rng& rng) {
  TrainStepReport report;
  const int batch = config_.batch_size;
  if (buffer_.size() < static_cast<std::size_t>(batch)) return report;

  Eigen::MatrixXd states(config_.state_dim, batch);
  Eigen::MatrixXd actions(config_.action_dim, batch);
  Eigen::RowVectorXd rewards(batch);
  Eigen::MatrixXd next_states(config_.state_dim, batch);
  for (int b = 0; b < batch; ++b) {
    const Transition& t = buffer_.sample_one(rng);
    states.col(b) = t.state;
    actions.col(b) = t.action;
    rewards(b) = t.reward;
    next_states.col(b) = t.next_state;
  }

  // Bellman targets from the target networks.
  const Eigen::MatrixXd next_actions = actor_target_.forward(next_states);
  const Eigen::MatrixXd next_q = critic_target_.forward(next_states, &next_actions);
  const Eigen::MatrixXd targets = rewards + config_.discount * next_q;

  // Critic regression toward the targets.
  ForwardCache critic_cache;
  const Eigen::MatrixXd q = critic_.forward(states, &actions, &critic_cache);
  const Eigen::MatrixXd err = q - targets;
  report.critic_loss = err.array().square().mean();
  const Eigen::MatrixXd dloss_dq = (2.0 / batch) * err;
  adam_step(critic_opt_, critic_, critic_.backward(critic_cache, dloss_dq));

  // Actor ascends the critic's value of its own actions.
  ForwardCache actor_cache;
  const Eigen::MatrixXd policy_actions = actor_.forward(states, nullptr, &actor_cache);
  ForwardCache value_cache;
  const Eigen::MatrixXd policy_q = critic_.forward(states, &policy_actions, &value_cache);
  report.actor_objective = policy_q.mean();
  const MlpGradients critic_in_grads =
      critic_.backward(value_cache, Eigen::MatrixXd::Constant(1, batch, 1.0 / batch));
  // Minimize -mean Q, i.e. feed the negated action gradient through the actor.
  adam_step(actor_opt_, actor_, actor_.backward(actor_cache, -critic_in_grads.aux_input));

  soft_update(actor_target_, actor_, config_.tau);
  soft_update(critic_target_, critic_, config_.tau);

  report.trained = true;
  return report;
}

void DdpgAgent::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("DdpgAgent::save: cannot open " + path);
  write_checkpoint_header(os);

  auto put_d = [&os](double v) { os.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  auto put_i = [&os](std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  put_i(config_.state_dim);
  put_i(config_.action_dim);
  put_d(config_.action_bound);
  put_i(static_cast<std::int64_t>(config_.actor_hidden.size()));
  for (int h : config_.actor_hidden) put_i(h);
  put_i(static_cast<std::int64_t>(config_.critic_hidden.size()));
  for (int h : config_.critic_hidden) put_i(h);
  put_d(config_.actor_lr);
  put_d(config_.critic_lr);
  put_d(config_.discount);
  put_d(config_.tau);
  put_i(config_.batch_size);
  put_i(static_cast<std::int64_t>(config_.buffer_capacity));
  put_i(config_.warmup);
  put_d(config_.ou_xi);
  put_d(config_.ou_sigma_start);
  put_d(config_.ou_sigma_end);

  save_mlp(os, actor_);
  save_mlp(os, critic_);
  save_mlp(os, actor_target_);
  save_mlp(os, critic_target_);
  save_adam_state(os, actor_opt_);
  save_adam_state(os, critic_opt_);
  if (!os) throw ConfigError("DdpgAgent::save: write failed for " + path);
}

DdpgAgent DdpgAgent::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("DdpgAgent::load: cannot open " + path);
  read_checkpoint_header(is);

  auto get_d = [&is]() {
    double v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw ConfigError("DdpgAgent::load: truncated file");
    return v;
  };
  auto get_i = [&is]() {
    std::int64_t v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw ConfigError("DdpgAgent::load: truncated file");
    return v;
  };

  DdpgConfig cfg;
  cfg.state_dim = static_cast<int>(get_i());
  cfg.action_dim = static_cast<int>(get_i());
  cfg.action_bound = get_d();
  cfg.actor_hidden.resize(static_cast<std::size_t>(get_i()));
  for (auto& h : cfg.actor_hidden) h = static_cast<int>(get_i());
  cfg.critic_hidden.resize(static_cast<std::size_t>(get_i()));
  for (auto& h : cfg.critic_hidden) h = static_cast<int>(get_i());
  cfg.actor_lr = get_d();
  cfg.critic_lr = get_d();
  cfg.discount = get_d();
  cfg.tau = get_d();
  cfg.batch_size = static_cast<int>(get_i());
  cfg.buffer_capacity = static_cast<std::size_t>(get_i());
  cfg.warmup = static_cast<int>(get_i());
  cfg.ou_xi = get_d();
  cfg.ou_sigma_start = get_d();
  cfg.ou_sigma_end = get_d();
  cfg.validate();

  DdpgAgent agent;
  agent.config_ = cfg;
  agent.buffer_ = ReplayBuffer(cfg.buffer_capacity);
  agent.actor_ = load_mlp(is);
  agent.critic_ = load_mlp(is);
  agent.actor_target_ = load_mlp(is);
  agent.critic_target_ = load_mlp(is);
  agent.actor_opt_ = load_adam_state(is);
  agent.critic_opt_ = load_adam_state(is);

  if (agent.actor_.input_dim() != cfg.state_dim ||
      agent.actor_.output_dim() != cfg.action_dim ||
      agent.critic_.aux_dim() != cfg.action_dim) {
    throw ConfigError("DdpgAgent::load: network shapes disagree with config");
  }
  return agent;
}

TrainResult run_episodes(DdpgAgent& agent, Environment& env, int episodes,
                         int steps_per_episode, Rng& rng) {
  if (episodes < 0 || steps_per_episode < 1) {
    throw ConfigError("run_episodes: need episodes >= 0 and steps_per_episode >= 1");
  }
  TrainResult result;
  result.best_layout = env.layout();
  result.best_reward = -std::numeric_limits<double>::infinity();
  if (episodes == 0) return result;

  const double bound = agent.config().action_bound;
  const double sigma_hi = agent.config().ou_sigma_start * bound;
  const double sigma_lo = agent.config().ou_sigma_end * bound;
  const long total_steps = static_cast<long>(episodes) * steps_per_episode;
  OuNoise noise(agent.config().action_dim, agent.config().ou_xi, sigma_hi);

  long global_step = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    Eigen::VectorXd state = env.reset(rng);
    noise.reset();
    EpisodeRow row;
    row.episode = ep;
    StepResult last{};
    int steps = 0;
    for (int t = 0; t < steps_per_episode; ++t) {
      const double frac =
          total_steps > 1 ? static_cast<double>(global_step) / (total_steps - 1) : 0.0;
      noise.set_varsigma(sigma_hi + (sigma_lo - sigma_hi) * frac);

      const Eigen::VectorXd action = agent.act(state, noise, rng);
      last = env.step(action);
      agent.remember({state, action, last.reward, last.next_state});
      if (agent.ready_to_train()) agent.train_step(rng);

      row.total_return += last.reward;
      if (last.reward > result.best_reward) {
        result.best_reward = last.reward;
        result.best_layout = env.layout();
        result.best_found = true;
      }
      state = last.next_state;
      ++global_step;
      ++steps;
      if (last.done) break;
    }
    row.mean_reward = steps > 0 ? row.total_return / steps : 0.0;
    row.final_rate = last.rate;
    row.final_sensing_slacks =
        last.sensing_gains.array() - env.scenario().gamma;
    result.log.push_back(std::move(row));
  }
  return result;
}

}  // namespace fasisac
