#include "fasisac/bcd.hpp"

#include <cmath>
#include <utility>

#include "fasisac/channel.hpp"
#include "fasisac/errors.hpp"

namespace fasisac {
namespace {

struct LocalSolve {
  SolveStatus status = SolveStatus::kOptimal;
  Covariance relaxed;
  Covariance recovered;
  double relaxed_rate = 0.0;
  std::optional<double> recovered_rate;
  std::vector<double> sensing_slacks;
  std::optional<Eigen::VectorXd> infeasibility_certificate;
  double certificate_bound = 0.0;
  bool usable() const { return status == SolveStatus::kOptimal && recovered_rate.has_value(); }
};

// One covariance solve + rank-one recovery at a fixed layout.
LocalSolve solve_at(const AntennaLayout& layout, const Scenario& scenario,
                    const BcdConfig& config, Rng& solver_rng) {
  LocalSolve out;
  const Eigen::RowVectorXcd channel = channel_vector(layout, scenario);
  const std::vector<Eigen::MatrixXcd> targets = target_matrices(layout, scenario);

  auto [relaxed, solve_report] = solve_covariance(channel, targets, scenario.p_max,
                                                  scenario.gamma, scenario.noise_power,
                                                  config.solver);
  out.status = solve_report.status;
  out.relaxed = std::move(relaxed);
  out.relaxed_rate = solve_report.relaxed_rate;
  out.infeasibility_certificate = solve_report.infeasibility_certificate;
  out.certificate_bound = solve_report.certificate_bound;
  if (out.status != SolveStatus::kOptimal) return out;

  auto [recovered, rand_report] =
      gaussian_randomize(out.relaxed, channel, targets, scenario.p_max, scenario.gamma,
                         scenario.noise_power, config.randomization_samples, solver_rng);
  out.recovered = std::move(recovered);
  out.recovered_rate = rand_report.recovered_rate;
  if (!rand_report.recovered_rate.has_value()) {
    out.status = rand_report.status;  // rank-one recovery failed
    return out;
  }
  // Slacks of the recovered point: constraint_slacks holds power first.
  if (rand_report.constraint_slacks.size() > 1) {
    out.sensing_slacks.assign(rand_report.constraint_slacks.begin() + 1,
                              rand_report.constraint_slacks.end());
  }
  return out;
}

BcdIteration make_row(int iteration, const LocalSolve& s, double best_rate, bool adopted) {
  BcdIteration row;
  row.iteration = iteration;
  row.relaxed_rate = s.relaxed_rate;
  row.recovered_rate = s.recovered_rate;
  row.sensing_slacks = s.sensing_slacks;
  row.best_rate = best_rate;
  row.layout_adopted = adopted;
  return row;
}

void check_best_consistency(const OptResult& result, const Scenario& scenario) {
  if (result.status != SolveStatus::kOptimal) return;
  const double recomputed =
      communication_rate(channel_vector(result.best_layout, scenario), result.best_covariance,
                         scenario.noise_power);
  if (std::abs(recomputed - result.best_rate) > 1e-9 * (1.0 + std::abs(result.best_rate))) {
    throw NumericalError("bcd: best rate is inconsistent with the reported configuration");
  }
}

}  // namespace

void BcdConfig::validate() const {
  if (num_bs < 1) throw ConfigError("BcdConfig: num_bs must be >= 1");
  if (max_outer_iters < 1) throw ConfigError("BcdConfig: max_outer_iters must be >= 1");
  if (!(rate_tolerance > 0.0)) throw ConfigError("BcdConfig: rate_tolerance must be > 0");
  if (ddpg_episodes < 0) throw ConfigError("BcdConfig: ddpg_episodes must be >= 0");
  if (steps_per_episode < 1) throw ConfigError("BcdConfig: steps_per_episode must be >= 1");
  if (randomization_samples < 1) throw ConfigError("BcdConfig: randomization_samples must be >= 1");
}

OptResult fpa_baseline(const Scenario& scenario, const BcdConfig& config, Rng& rng) {
  config.validate();
  Rng solver_rng = rng.split(0);

  OptResult result;
  result.best_layout =
      fpa_layout(config.num_bs, scenario.wavelength, scenario.region_bs, scenario.region_ut);

  const LocalSolve s = solve_at(result.best_layout, scenario, config, solver_rng);
  result.status = s.status;
  result.infeasibility_certificate = s.infeasibility_certificate;
  result.certificate_bound = s.certificate_bound;
  result.relaxed_rate = s.relaxed_rate;
  if (s.usable()) {
    result.best_covariance = s.recovered;
    result.best_rate = *s.recovered_rate;
  } else {
    result.best_covariance = Covariance::zero(config.num_bs);
  }
  result.trace.push_back(make_row(0, s, result.best_rate, false));
  check_best_consistency(result, scenario);
  return result;
}

OptResult optimize(const Scenario& scenario, const BcdConfig& config, Rng& rng) {
  config.validate();
  Rng solver_rng = rng.split(0);
  Rng agent_rng = rng.split(1);
  Rng train_rng = rng.split(2);

  OptResult result;
  AntennaLayout cur_layout =
      fpa_layout(config.num_bs, scenario.wavelength, scenario.region_bs, scenario.region_ut);

  // Initial solve at the grid: identical to fpa_baseline by construction, so
  // the reported best can never fall below the fixed-position result.
  const LocalSolve initial = solve_at(cur_layout, scenario, config, solver_rng);
  result.status = initial.status;
  result.infeasibility_certificate = initial.infeasibility_certificate;
  result.certificate_bound = initial.certificate_bound;
  result.relaxed_rate = initial.relaxed_rate;
  if (!initial.usable()) {
    result.best_layout = cur_layout;
    result.best_covariance = Covariance::zero(config.num_bs);
    result.trace.push_back(make_row(0, initial, 0.0, false));
    return result;
  }

  result.best_layout = cur_layout;
  result.best_covariance = initial.recovered;
  result.best_rate = *initial.recovered_rate;
  result.trace.push_back(make_row(0, initial, result.best_rate, false));

  if (config.ddpg_episodes == 0) {
    check_best_consistency(result, scenario);
    return result;
  }

  EnvConfig env_cfg = config.env;
  env_cfg.episode_length = config.steps_per_episode;
  Environment env(scenario, config.num_bs, env_cfg);
  env.set_covariance(initial.recovered);

  DdpgConfig agent_cfg = config.agent;
  agent_cfg.state_dim = env.state_dim();
  agent_cfg.action_dim = env.action_dim();
  agent_cfg.action_bound = env.action_bound();
  DdpgAgent agent(agent_cfg, agent_rng);

  Covariance cur_cov = initial.recovered;
  for (int iter = 1; iter <= config.max_outer_iters; ++iter) {
    const double best_before = result.best_rate;

    const TrainResult trained =
        run_episodes(agent, env, config.ddpg_episodes, config.steps_per_episode, train_rng);
    if (!trained.best_found) break;  // no steps taken, nothing can change

    // Adopt the candidate layout only when a fresh solve there is feasible
    // and recoverable; otherwise keep the current block point.
    const LocalSolve cand = solve_at(trained.best_layout, scenario, config, solver_rng);
    bool adopted = false;
    if (cand.usable()) {
      adopted = true;
      cur_layout = trained.best_layout;
      cur_cov = cand.recovered;
      env.set_covariance(cur_cov);
      if (*cand.recovered_rate > result.best_rate) {
        result.best_rate = *cand.recovered_rate;
        result.best_layout = cur_layout;
        result.best_covariance = cur_cov;
        result.relaxed_rate = cand.relaxed_rate;
      }
    }
    result.trace.push_back(make_row(iter, cand, result.best_rate, adopted));

    if (result.best_rate - best_before < config.rate_tolerance) break;
  }

  check_best_consistency(result, scenario);
  return result;
}

}  // namespace fasisac
