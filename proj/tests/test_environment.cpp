#include <cmath>
#include <vector>

#include "doctest.h"
#include "fasisac/channel.hpp"
#include "fasisac/environment.hpp"
#include "fasisac/errors.hpp"
#include "fasisac/rng.hpp"
#include "fasisac/scenario.hpp"

using namespace fasisac;

namespace {

Scenario default_scenario(unsigned seed = 1, int num_targets = 1) {
  Rng rng(seed);
  ScenarioConfig cfg;
  cfg.num_targets = num_targets;
  return sample_scenario(rng, cfg);
}

AntennaLayout two_antenna_layout(const Vec2& a, const Vec2& b) {
  AntennaLayout layout;
  layout.bs_positions.resize(2, 2);
  layout.bs_positions.col(0) = a;
  layout.bs_positions.col(1) = b;
  layout.ut_position = Vec2::Zero();
  return layout;
}

}  // namespace

TEST_CASE("build_state: length and spectral features") {
  Scenario s = default_scenario();
  AntennaLayout layout = fpa_layout(2, s.wavelength, s.region_bs, s.region_ut);

  SUBCASE("length is 2(N+1)+3") {
    Covariance u = Covariance::zero(2);
    CHECK(build_state(layout, u).size() == 9);
  }
  SUBCASE("identity covariance gives features (N, 1, 1)") {
    Covariance u{Eigen::MatrixXcd::Identity(2, 2), std::nullopt};
    Eigen::VectorXd state = build_state(layout, u);
    CHECK(state(6) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(state(7) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(state(8) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("rank-one covariance gives features (|u|^2, |u|^2, |u|^2/N)") {
    Eigen::VectorXcd u(2);
    u << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 2.0);
    Eigen::VectorXd state = build_state(layout, Covariance::from_factor(u));
    CHECK(state(6) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(state(7) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(state(8) == doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("coordinates appear in antenna order, then the user antenna") {
    Covariance u = Covariance::zero(2);
    Eigen::VectorXd state = build_state(layout, u);
    CHECK(state(0) == layout.bs_positions(0, 0));
    CHECK(state(1) == layout.bs_positions(1, 0));
    CHECK(state(2) == layout.bs_positions(0, 1));
    CHECK(state(3) == layout.bs_positions(1, 1));
    CHECK(state(4) == layout.ut_position.x());
    CHECK(state(5) == layout.ut_position.y());
  }
}

TEST_CASE("build_state: trace >= lambda_max >= mean eigenvalue >= 0 across N") {
  Rng rng(7);
  for (int n : {2, 4, 8}) {
    Scenario s = default_scenario(static_cast<unsigned>(n));
    AntennaLayout layout = fpa_layout(n, s.wavelength, s.region_bs, s.region_ut);
    Eigen::MatrixXcd m(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) m(r, c) = std::complex<double>(rng.normal(), rng.normal());
    Covariance u{m * m.adjoint(), std::nullopt};
    Eigen::VectorXd state = build_state(layout, u);
    REQUIRE(state.size() == 2 * (n + 1) + 3);
    const double tr = state(2 * n + 2), lmax = state(2 * n + 3), lmean = state(2 * n + 4);
    CHECK(tr >= lmax);
    CHECK(lmax >= lmean);
    CHECK(lmean >= 0.0);
    CHECK(tr == doctest::Approx(n * lmean).epsilon(1e-12));
  }
}

TEST_CASE("apply_action: zero action leaves the layout unchanged") {
  Scenario s = default_scenario();
  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);
  AntennaLayout next = apply_action(layout, Eigen::VectorXd::Zero(10), s);
  CHECK(next.bs_positions == layout.bs_positions);
  CHECK(next.ut_position == layout.ut_position);
}

TEST_CASE("apply_action: user antenna clamps onto the region boundary") {
  Scenario s = default_scenario();
  AntennaLayout layout = fpa_layout(2, s.wavelength, s.region_bs, s.region_ut);
  layout.ut_position = Vec2(1.5, 0.0);  // region half-width 2, bound A/4 = 1
  Eigen::VectorXd action = Eigen::VectorXd::Zero(6);
  action(4) = 1.0;
  AntennaLayout next = apply_action(layout, action, s);
  CHECK(next.ut_position.x() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(next.ut_position.y() == 0.0);
}

TEST_CASE("apply_action: components clip to A/4 before anything else") {
  Scenario s = default_scenario();
  s.d_s = 0.1;
  AntennaLayout layout = two_antenna_layout(Vec2(-1.0, 0.0), Vec2(1.0, 0.0));
  Eigen::VectorXd action = Eigen::VectorXd::Zero(6);
  action(0) = -50.0;  // requested way past the bound
  action(1) = 0.25;
  AntennaLayout next = apply_action(layout, action, s);
  CHECK(next.bs_positions(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));  // -1 + clip = -1 - 1
  CHECK(next.bs_positions(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("apply_action: move into the spacing floor is rejected, mover stays put") {
  Scenario s = default_scenario();  // d_s = 0.5, A/4 = 1
  AntennaLayout layout = two_antenna_layout(Vec2(0.0, 0.0), Vec2(0.5, 0.0));

  SUBCASE("full-bound move toward a neighbor at exactly d_s") {
    Eigen::VectorXd action = Eigen::VectorXd::Zero(6);
    action(2) = -1.0;  // antenna 1 heads straight at antenna 0
    AntennaLayout next = apply_action(layout, action, s);
    CHECK(next.bs_positions.col(1) == layout.bs_positions.col(1));
    CHECK(next.bs_positions.col(0) == layout.bs_positions.col(0));
  }
  SUBCASE("earlier antenna still moves normally") {
    Eigen::VectorXd action = Eigen::VectorXd::Zero(6);
    action(1) = 0.3;    // antenna 0 steps away sideways
    action(2) = -0.25;  // antenna 1 would land 0.25 from antenna 0's old spot
    AntennaLayout next = apply_action(layout, action, s);
    CHECK(next.bs_positions(1, 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(next.bs_positions.col(1) == layout.bs_positions.col(1));
  }
  SUBCASE("move that lands clear of the floor is accepted") {
    Eigen::VectorXd action = Eigen::VectorXd::Zero(6);
    action(2) = 0.75;  // antenna 1 moves away
    AntennaLayout next = apply_action(layout, action, s);
    CHECK(next.bs_positions(0, 1) == doctest::Approx(1.25).epsilon(1e-15));
  }
}

TEST_CASE("apply_action: settled positions shield later antennas") {
  Scenario s = default_scenario();
  s.d_s = 0.5;
  // Antenna 0 moves next to antenna 1's old spot; antenna 1 tries to move into
  // the spacing floor elsewhere and is rejected, so it must still be protected
  // from antenna 0's new position.
  AntennaLayout layout = two_antenna_layout(Vec2(-1.0, 0.0), Vec2(0.5, 0.0));
  Eigen::VectorXd action = Eigen::VectorXd::Zero(6);
  action(0) = 0.9;   // antenna 0 tentative (-0.1, 0): 0.6 > d_s from antenna 1 -> accepted
  action(2) = -0.3;  // antenna 1 tentative (0.2, 0): 0.3 <= d_s from new antenna 0 -> rejected
  AntennaLayout next = apply_action(layout, action, s);
  CHECK(next.bs_positions(0, 0) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(next.bs_positions.col(1) == layout.bs_positions.col(1));
  CHECK(min_distance_ok(next, s.d_s));
}

TEST_CASE("apply_action: rejects layouts that already violate the spacing floor") {
  Scenario s = default_scenario();
  AntennaLayout bad = two_antenna_layout(Vec2(0.0, 0.0), Vec2(0.3, 0.0));
  CHECK_THROWS_AS(apply_action(bad, Eigen::VectorXd::Zero(6), s), ConfigError);
  Eigen::VectorXd wrong_len = Eigen::VectorXd::Zero(5);
  AntennaLayout ok = two_antenna_layout(Vec2(0.0, 0.0), Vec2(1.0, 0.0));
  CHECK_THROWS_AS(apply_action(ok, wrong_len, s), ConfigError);
}

TEST_CASE("apply_action: random action sequences keep every constraint exactly") {
  Scenario s = default_scenario(42, 2);
  Rng rng(99);
  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd action(10);
    for (int i = 0; i < 10; ++i) action(i) = 3.0 * (rng.uniform01() - 0.5);
    layout = apply_action(layout, action, s);
    REQUIRE(min_distance_ok(layout, s.d_s));
    for (int i = 0; i < 4; ++i) REQUIRE(s.region_bs.contains(layout.bs_positions.col(i)));
    REQUIRE(s.region_ut.contains(layout.ut_position));
  }
}

TEST_CASE("reward: slack constraints and zero action give exactly the rate") {
  Scenario s = default_scenario(3, 1);
  s.gamma = 0.0;
  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);
  Eigen::VectorXcd u = Eigen::VectorXcd::Constant(4, std::complex<double>(0.4, 0.1));
  Covariance cov = Covariance::from_factor(u);  // tr = 4*0.17 = 0.68 < p_max
  const double rate = communication_rate(channel_vector(layout, s), cov, s.noise_power);
  RewardWeights w;
  const double r = reward(layout, cov, s, w, Eigen::VectorXd::Zero(10));
  CHECK(r == doctest::Approx(rate).epsilon(1e-15));
}

TEST_CASE("reward: sensing shortfall is charged linearly") {
  Scenario s = default_scenario(5, 1);
  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);

  // Scale the identity so the single target sees a gain of exactly 3.
  Covariance eye{Eigen::MatrixXcd::Identity(4, 4), std::nullopt};
  const double unit_gain = sensing_gain(target_matrices(layout, s)[0], eye);
  const double c = 3.0 / unit_gain;
  Covariance cov{c * Eigen::MatrixXcd::Identity(4, 4), std::nullopt};
  s.p_max = 4.0 * c + 1.0;  // keep the power term slack
  s.gamma = 5.0;

  RewardWeights w;
  w.alpha1 = 2.0;
  w.alpha2 = 1.0;
  w.alpha3 = 0.1;
  const double rate = communication_rate(channel_vector(layout, s), cov, s.noise_power);
  const double r = reward(layout, cov, s, w, Eigen::VectorXd::Zero(10));
  CHECK(r == doctest::Approx(rate - 4.0).epsilon(1e-12));  // alpha1 * (5 - 3) = 4
}

TEST_CASE("reward: pure movement cost") {
  Rng rng(11);
  ScenarioConfig cfg;
  cfg.num_targets = 1;
  cfg.wavelength = 4.0;
  cfg.region_side = 16.0;  // A/4 = 4, so a (3,4) move is within bounds
  cfg.d_s = 0.5;
  Scenario s = sample_scenario(rng, cfg);
  s.sigma_matrix.setZero();  // kills the channel, so the rate term is 0

  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);
  Covariance cov = Covariance::zero(4);
  RewardWeights w;
  w.alpha1 = 1.0;
  w.alpha2 = 1.0;
  w.alpha3 = 1.0;
  Eigen::VectorXd action = Eigen::VectorXd::Zero(10);
  action(0) = 3.0;
  action(1) = 4.0;  // displacement norm 5, averaged over N+1 = 5 antennas
  const double r = reward(layout, cov, s, w, action);
  CHECK(r == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("reward: strictly decreasing in the sensing shortfall") {
  Scenario s = default_scenario(8, 2);
  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);
  Eigen::VectorXcd u = Eigen::VectorXcd::Constant(4, std::complex<double>(0.3, 0.0));
  Covariance cov = Covariance::from_factor(u);
  RewardWeights w;
  const auto targets = target_matrices(layout, s);
  double max_gain = 0.0;
  for (const auto& t : targets) max_gain = std::max(max_gain, sensing_gain(t, cov));

  double prev = 0.0;
  bool first = true;
  for (double gamma : {max_gain + 1.0, max_gain + 2.0, max_gain + 5.0}) {
    s.gamma = gamma;
    const double r = reward(layout, cov, s, w, Eigen::VectorXd::Zero(10));
    if (!first) CHECK(r < prev);
    prev = r;
    first = false;
  }
}

TEST_CASE("reward: flipped sign convention charges satisfaction instead") {
  Scenario s = default_scenario(13, 1);
  AntennaLayout layout = fpa_layout(4, s.wavelength, s.region_bs, s.region_ut);
  Covariance eye{Eigen::MatrixXcd::Identity(4, 4), std::nullopt};
  const double gain = sensing_gain(target_matrices(layout, s)[0], eye);
  s.gamma = gain / 2.0;  // satisfied with margin gain/2
  s.p_max = 10.0;        // tr = 4, excess under the flipped rule is 6
  RewardWeights w;
  w.alpha1 = 1.0;
  w.alpha2 = 1.0;
  w.alpha3 = 0.0;
  const double rate = communication_rate(channel_vector(layout, s), eye, s.noise_power);

  const double r_default = reward(layout, eye, s, w, Eigen::VectorXd::Zero(10));
  CHECK(r_default == doctest::Approx(rate).epsilon(1e-12));

  const double r_flipped = reward(layout, eye, s, w, Eigen::VectorXd::Zero(10),
                                  RewardSignConvention::kAsPrinted);
  CHECK(r_flipped == doctest::Approx(rate - gain / 2.0 - 6.0).epsilon(1e-12));
}

TEST_CASE("Environment::step agrees with the standalone pieces") {
  Scenario s = default_scenario(21, 2);
  s.gamma = 0.1;
  Environment env(s, 4);
  Rng rng(77);
  env.reset(rng);
  Eigen::VectorXcd u = Eigen::VectorXcd::Constant(4, std::complex<double>(0.35, -0.2));
  env.set_covariance(Covariance::from_factor(u));

  Eigen::VectorXd action(10);
  for (int i = 0; i < 10; ++i) action(i) = 0.1 * (i - 5);

  const AntennaLayout before = env.layout();
  const double standalone =
      reward(before, env.covariance(), s, env.config().weights, action);
  StepResult res = env.step(action);
  CHECK(res.reward == doctest::Approx(standalone).epsilon(1e-12));

  const auto targets = target_matrices(env.layout(), s);
  REQUIRE(res.sensing_gains.size() == 2);
  for (int k = 0; k < 2; ++k) {
    const double gain = sensing_gain(targets[static_cast<std::size_t>(k)], env.covariance());
    CHECK(res.sensing_gains(k) == doctest::Approx(gain).epsilon(1e-12));
    CHECK(res.sensing_violated[static_cast<std::size_t>(k)] == (gain < s.gamma));
  }
  CHECK(res.rate == doctest::Approx(communication_rate(channel_vector(env.layout(), s),
                                                       env.covariance(), s.noise_power))
                        .epsilon(1e-12));
  CHECK(res.next_state == build_state(env.layout(), env.covariance()));
  CHECK_FALSE(res.power_violated);  // tr = 4 * |0.35 - 0.2i|^2 = 0.65 < 1
}

TEST_CASE("Environment: zero actions repeat the same state, done fires at the cap") {
  Scenario s = default_scenario(30, 1);
  EnvConfig cfg;
  cfg.episode_length = 5;
  Environment env(s, 2, cfg);
  Rng rng(1);
  Eigen::VectorXd state = env.reset(rng);
  for (int t = 0; t < 5; ++t) {
    StepResult res = env.step(Eigen::VectorXd::Zero(6));
    CHECK(res.next_state == state);
    CHECK(res.done == (t == 4));
  }
}

TEST_CASE("Environment::reset: grid policy reproduces the half-wavelength grid") {
  Scenario s = default_scenario(2, 1);
  Environment env(s, 4);
  Rng rng(5);
  env.reset(rng);
  const auto& p = env.layout().bs_positions;
  // 2x2 grid, spacing 0.5, centered at the origin, filled row-major.
  CHECK(p.col(0).isApprox(Vec2(-0.25, -0.25), 1e-15));
  CHECK(p.col(1).isApprox(Vec2(0.25, -0.25), 1e-15));
  CHECK(p.col(2).isApprox(Vec2(-0.25, 0.25), 1e-15));
  CHECK(p.col(3).isApprox(Vec2(0.25, 0.25), 1e-15));
  CHECK(env.layout().ut_position == s.region_ut.center);
}

TEST_CASE("Environment::reset: random placement is valid and seed-stable") {
  Scenario s = default_scenario(2, 1);
  EnvConfig cfg;
  cfg.initial_layout = InitialLayoutPolicy::kRandomValid;
  Environment env_a(s, 6, cfg);
  Environment env_b(s, 6, cfg);

  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    Rng rng(seed);
    env_a.reset(rng);
    CHECK(min_distance_ok(env_a.layout(), s.d_s));
    for (int i = 0; i < 6; ++i) CHECK(s.region_bs.contains(env_a.layout().bs_positions.col(i)));
  }

  Rng ra(123), rb(123);
  env_a.reset(ra);
  env_b.reset(rb);
  CHECK(env_a.layout().bs_positions == env_b.layout().bs_positions);
}

TEST_CASE("Environment::reset: impossible packing raises a config error") {
  Scenario s = default_scenario(2, 1);
  s.d_s = 3.9;  // region side 4: nowhere to put 9 antennas pairwise >= 3.9 apart
  EnvConfig cfg;
  cfg.initial_layout = InitialLayoutPolicy::kRandomValid;
  Environment env(s, 9, cfg);
  Rng rng(8);
  CHECK_THROWS_AS(env.reset(rng), ConfigError);
}

TEST_CASE("Environment: state and action dimensions track N") {
  Scenario s = default_scenario(2, 1);
  for (int n : {2, 4, 8}) {
    Environment env(s, n);
    CHECK(env.state_dim() == 2 * (n + 1) + 3);
    CHECK(env.action_dim() == 2 * (n + 1));
    CHECK(env.action_bound() == doctest::Approx(1.0).epsilon(1e-15));  // A/4 with A = 4
    Rng rng(3);
    CHECK(env.reset(rng).size() == env.state_dim());
  }
}
