#include "fasisac/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fasisac/errors.hpp"

namespace fasisac {
namespace {

double clip(double v, double bound) { return std::min(std::max(v, -bound), bound); }

// Mean 2-norm of the realized displacements of all N+1 antennas.
double mean_displacement(const AntennaLayout& before, const AntennaLayout& after) {
  const int n = before.num_bs();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += (after.bs_positions.col(i) - before.bs_positions.col(i)).norm();
  }
  sum += (after.ut_position - before.ut_position).norm();
  return sum / static_cast<double>(n + 1);
}

}  // namespace

Eigen::VectorXd build_state(const AntennaLayout& layout, const Covariance& covariance) {
  const int n = layout.num_bs();
  Eigen::VectorXd state(2 * (n + 1) + 3);
  for (int i = 0; i < n; ++i) {
    state(2 * i) = layout.bs_positions(0, i);
    state(2 * i + 1) = layout.bs_positions(1, i);
  }
  state(2 * n) = layout.ut_position.x();
  state(2 * n + 1) = layout.ut_position.y();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(covariance.matrix),
                                                     Eigen::EigenvaluesOnly);
  const Eigen::VectorXd eigs = es.eigenvalues().cwiseMax(0.0);
  state(2 * n + 2) = eigs.sum();
  state(2 * n + 3) = eigs.maxCoeff();
  state(2 * n + 4) = eigs.mean();
  return state;
}

AntennaLayout apply_action(const AntennaLayout& layout, const Eigen::VectorXd& action,
                           const Scenario& scenario) {
  const int n = layout.num_bs();
  if (action.size() != 2 * (n + 1)) {
    throw ConfigError("apply_action: action has length " + std::to_string(action.size()) +
                      ", expected " + std::to_string(2 * (n + 1)));
  }
  if (!min_distance_ok(layout, scenario.d_s)) {
    throw ConfigError("apply_action: input layout violates the minimum antenna spacing");
  }

  const double bound = scenario.region_side() / 4.0;
  AntennaLayout next = layout;

  for (int i = 0; i < n; ++i) {
    const Vec2 delta(clip(action(2 * i), bound), clip(action(2 * i + 1), bound));
    const Vec2 tentative = scenario.region_bs.clamp(layout.bs_positions.col(i) + delta);
    // Distance check against every other antenna at its current position:
    // earlier indices already settled, later ones still at their old spots.
    // "Within d_s" is inclusive, so a move may only land strictly clear of the
    // spacing floor; staying put is always allowed.
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      if (j == i) continue;
      if ((tentative - next.bs_positions.col(j)).norm() <= scenario.d_s) ok = false;
    }
    if (ok) next.bs_positions.col(i) = tentative;
  }

  const Vec2 ut_delta(clip(action(2 * n), bound), clip(action(2 * n + 1), bound));
  next.ut_position = scenario.region_ut.clamp(layout.ut_position + ut_delta);
  return next;
}

double reward(const AntennaLayout& layout, const Covariance& covariance,
              const Scenario& scenario, const RewardWeights& weights,
              const Eigen::VectorXd& action, RewardSignConvention convention) {
  const AntennaLayout after = apply_action(layout, action, scenario);

  const double rate =
      communication_rate(channel_vector(after, scenario), covariance, scenario.noise_power);

  double sensing_penalty = 0.0;
  for (const auto& target : target_matrices(after, scenario)) {
    const double gain = sensing_gain(target, covariance);
    if (convention == RewardSignConvention::kShortfall) {
      sensing_penalty += std::max(0.0, scenario.gamma - gain);
    } else {
      sensing_penalty += std::max(0.0, gain - scenario.gamma);
    }
  }

  const double tr = covariance.trace();
  const double power_penalty = convention == RewardSignConvention::kShortfall
                                   ? std::max(0.0, tr - scenario.p_max)
                                   : std::max(0.0, scenario.p_max - tr);

  return rate - weights.alpha1 * sensing_penalty - weights.alpha2 * power_penalty -
         weights.alpha3 * mean_displacement(layout, after);
}

Environment::Environment(Scenario scenario, int num_bs, EnvConfig config)
    : scenario_(std::move(scenario)), num_bs_(num_bs), config_(config) {
  if (num_bs_ < 1) throw ConfigError("Environment: need at least one BS antenna");
  if (config_.episode_length < 1) throw ConfigError("Environment: episode_length must be >= 1");
  scenario_.validate();
  covariance_ = Covariance::zero(num_bs_);
  layout_ = fpa_layout(num_bs_, scenario_.wavelength, scenario_.region_bs, scenario_.region_ut);
}

Eigen::VectorXd Environment::reset(Rng& rng) {
  if (config_.initial_layout == InitialLayoutPolicy::kFpaGrid) {
    layout_ = fpa_layout(num_bs_, scenario_.wavelength, scenario_.region_bs, scenario_.region_ut);
  } else {
    constexpr int kMaxAttempts = 10000;
    const Region& r = scenario_.region_bs;
    bool placed = false;
    AntennaLayout candidate;
    candidate.bs_positions.resize(2, num_bs_);
    candidate.ut_position = scenario_.region_ut.center;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      for (int i = 0; i < num_bs_; ++i) {
        candidate.bs_positions(0, i) = r.center.x() + r.half_width * (2.0 * rng.uniform01() - 1.0);
        candidate.bs_positions(1, i) = r.center.y() + r.half_width * (2.0 * rng.uniform01() - 1.0);
      }
      placed = min_distance_ok(candidate, scenario_.d_s);
    }
    if (!placed) {
      throw ConfigError("Environment::reset: could not place " + std::to_string(num_bs_) +
                        " antennas at spacing " + std::to_string(scenario_.d_s) +
                        " within 10000 attempts");
    }
    layout_ = candidate;
  }
  steps_taken_ = 0;
  return state();
}

void Environment::set_covariance(Covariance covariance) {
  if (covariance.dim() != num_bs_) {
    throw ConfigError("Environment::set_covariance: dimension mismatch");
  }
  covariance_ = std::move(covariance);
}

StepResult Environment::step(const Eigen::VectorXd& action) {
  const AntennaLayout before = layout_;
  layout_ = apply_action(layout_, action, scenario_);

  // Positional feasibility must hold after every step, exactly.
  if (!min_distance_ok(layout_, scenario_.d_s) ||
      !scenario_.region_ut.contains(layout_.ut_position, 1e-12)) {
    throw NumericalError("Environment::step produced an infeasible layout");
  }
  for (int i = 0; i < num_bs_; ++i) {
    if (!scenario_.region_bs.contains(layout_.bs_positions.col(i), 1e-12)) {
      throw NumericalError("Environment::step moved a BS antenna out of its region");
    }
  }

  StepResult result;
  result.rate =
      communication_rate(channel_vector(layout_, scenario_), covariance_, scenario_.noise_power);

  const auto targets = target_matrices(layout_, scenario_);
  result.sensing_gains.resize(static_cast<Eigen::Index>(targets.size()));
  result.sensing_violated.resize(targets.size());
  double sensing_penalty = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double gain = sensing_gain(targets[k], covariance_);
    result.sensing_gains(static_cast<Eigen::Index>(k)) = gain;
    result.sensing_violated[k] = gain < scenario_.gamma;
    if (config_.sign_convention == RewardSignConvention::kShortfall) {
      sensing_penalty += std::max(0.0, scenario_.gamma - gain);
    } else {
      sensing_penalty += std::max(0.0, gain - scenario_.gamma);
    }
  }

  const double tr = covariance_.trace();
  result.power_violated = tr > scenario_.p_max;
  const double power_penalty = config_.sign_convention == RewardSignConvention::kShortfall
                                   ? std::max(0.0, tr - scenario_.p_max)
                                   : std::max(0.0, scenario_.p_max - tr);

  result.reward = result.rate - config_.weights.alpha1 * sensing_penalty -
                  config_.weights.alpha2 * power_penalty -
                  config_.weights.alpha3 * mean_displacement(before, layout_);

  steps_taken_ += 1;
  result.done = steps_taken_ >= config_.episode_length;
  result.next_state = state();
  return result;
}

}  // namespace fasisac
