#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fasisac/bcd.hpp"
#include "fasisac/beamforming.hpp"
#include "fasisac/channel.hpp"
#include "fasisac/ddpg.hpp"
#include "fasisac/environment.hpp"
#include "fasisac/errors.hpp"
#include "fasisac/experiment.hpp"
#include "fasisac/geometry.hpp"
#include "fasisac/ou_noise.hpp"
#include "fasisac/replay.hpp"
#include "fasisac/rng.hpp"
#include "fasisac/scenario.hpp"

namespace py = pybind11;
using namespace fasisac;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Joint transmit-covariance and movable-antenna position optimization: "
      "channel models, an SDP covariance solver with rank-one recovery, a "
      "positioning environment with a DDPG agent, the alternating optimizer, "
      "and the sweep/reporting layer.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  // ---- randomness ----
  py::class_<Rng>(m, "Rng", "Deterministic mt19937_64 stream with splitting")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform01", &Rng::uniform01)
      .def("uniform", &Rng::uniform, py::arg("lo"), py::arg("hi"))
      .def("normal", &Rng::normal)
      .def("split", &Rng::split, py::arg("stream"),
           "Independent child stream; consumes one draw from this stream");
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream"),
        "splitmix64-based seed derivation used for per-scenario streams");

  // ---- geometry ----
  py::class_<Region>(m, "Region")
      .def(py::init<>())
      .def(py::init<double, const Vec2&>(), py::arg("half_width"),
           py::arg("center") = Vec2::Zero())
      .def_readwrite("half_width", &Region::half_width)
      .def_readwrite("center", &Region::center)
      .def("contains", &Region::contains, py::arg("p"), py::arg("tol") = 0.0)
      .def("clamp", &Region::clamp, py::arg("p"));

  py::class_<AntennaLayout>(m, "AntennaLayout")
      .def(py::init<>())
      .def_readwrite("bs_positions", &AntennaLayout::bs_positions)
      .def_readwrite("ut_position", &AntennaLayout::ut_position)
      .def("num_bs", &AntennaLayout::num_bs);

  py::class_<PathAngles>(m, "PathAngles")
      .def(py::init<>())
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("elevation"),
           py::arg("azimuth"))
      .def_readwrite("elevation", &PathAngles::elevation)
      .def_readwrite("azimuth", &PathAngles::azimuth)
      .def("num_paths", &PathAngles::num_paths);

  m.def("min_distance_ok", &min_distance_ok, py::arg("layout"), py::arg("d_s"));
  m.def("centered_grid", &centered_grid, py::arg("n"), py::arg("spacing"));
  m.def("fpa_layout", &fpa_layout, py::arg("n"), py::arg("wavelength"), py::arg("region_bs"),
        py::arg("region_ut"), "Fixed half-wavelength grid with the user at its region center");

  // ---- scenario ----
  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("tx_angles", &Scenario::tx_angles)
      .def_readwrite("rx_angles", &Scenario::rx_angles)
      .def_readwrite("target_angles", &Scenario::target_angles)
      .def_readwrite("sigma_matrix", &Scenario::sigma_matrix)
      .def_readwrite("wavelength", &Scenario::wavelength)
      .def_readwrite("noise_power", &Scenario::noise_power)
      .def_readwrite("p_max", &Scenario::p_max)
      .def_readwrite("gamma", &Scenario::gamma)
      .def_readwrite("d_s", &Scenario::d_s)
      .def_readwrite("region_bs", &Scenario::region_bs)
      .def_readwrite("region_ut", &Scenario::region_ut)
      .def("num_tx_paths", &Scenario::num_tx_paths)
      .def("num_rx_paths", &Scenario::num_rx_paths)
      .def("num_targets", &Scenario::num_targets)
      .def("region_side", &Scenario::region_side)
      .def("validate", &Scenario::validate);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("num_tx_paths", &ScenarioConfig::num_tx_paths)
      .def_readwrite("num_rx_paths", &ScenarioConfig::num_rx_paths)
      .def_readwrite("num_targets", &ScenarioConfig::num_targets)
      .def_readwrite("paths_per_target", &ScenarioConfig::paths_per_target)
      .def_readwrite("rician_tau", &ScenarioConfig::rician_tau)
      .def_readwrite("wavelength", &ScenarioConfig::wavelength)
      .def_readwrite("noise_power", &ScenarioConfig::noise_power)
      .def_readwrite("p_max", &ScenarioConfig::p_max)
      .def_readwrite("gamma", &ScenarioConfig::gamma)
      .def_readwrite("d_s", &ScenarioConfig::d_s)
      .def_readwrite("region_side", &ScenarioConfig::region_side)
      .def_readwrite("diagonal_sigma", &ScenarioConfig::diagonal_sigma);

  m.def("sample_scenario", &sample_scenario, py::arg("rng"), py::arg("config"));

  // ---- channel ----
  m.def("propagation_delta", &propagation_delta, py::arg("position"), py::arg("elevation"),
        py::arg("azimuth"));
  m.def("response_vector", &response_vector, py::arg("position"), py::arg("angles"),
        py::arg("wavelength"));
  m.def("response_matrix", &response_matrix, py::arg("positions"), py::arg("angles"),
        py::arg("wavelength"));
  m.def("channel_vector", &channel_vector, py::arg("layout"), py::arg("scenario"));
  m.def("target_matrices", &target_matrices, py::arg("layout"), py::arg("scenario"));
  m.def("communication_rate", &communication_rate, py::arg("channel"), py::arg("covariance"),
        py::arg("noise_power"));
  m.def("sensing_gain", &sensing_gain, py::arg("target_matrix"), py::arg("covariance"));

  // ---- covariance solver ----
  py::class_<Covariance>(m, "Covariance")
      .def(py::init<>())
      .def_readwrite("matrix", &Covariance::matrix)
      .def_readwrite("rank_one_factor", &Covariance::rank_one_factor)
      .def("dim", &Covariance::dim)
      .def("trace", &Covariance::trace)
      .def_static("zero", &Covariance::zero, py::arg("n"))
      .def_static("from_factor", &Covariance::from_factor, py::arg("u"));

  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("optimal", SolveStatus::kOptimal)
      .value("infeasible", SolveStatus::kInfeasible)
      .value("max_iter", SolveStatus::kMaxIter)
      .value("rank_one_recovery_failed", SolveStatus::kRankOneRecoveryFailed);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("barrier_t0", &SolverConfig::barrier_t0)
      .def_readwrite("barrier_reduction", &SolverConfig::barrier_reduction)
      .def_readwrite("gap_tol", &SolverConfig::gap_tol)
      .def_readwrite("newton_tol", &SolverConfig::newton_tol)
      .def_readwrite("max_newton_per_stage", &SolverConfig::max_newton_per_stage)
      .def_readwrite("max_total_newton", &SolverConfig::max_total_newton);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("status", &SolveReport::status)
      .def_readonly("relaxed_rate", &SolveReport::relaxed_rate)
      .def_readonly("recovered_rate", &SolveReport::recovered_rate)
      .def_readonly("constraint_slacks", &SolveReport::constraint_slacks)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("kkt_residual", &SolveReport::kkt_residual)
      .def_readonly("infeasibility_certificate", &SolveReport::infeasibility_certificate)
      .def_readonly("certificate_bound", &SolveReport::certificate_bound)
      .def_readonly("worst_slack", &SolveReport::worst_slack);

  m.def("sensing_constraint_matrices", &sensing_constraint_matrices, py::arg("target_mats"));
  m.def("solve_covariance", &solve_covariance, py::arg("channel"), py::arg("target_mats"),
        py::arg("p_max"), py::arg("gamma"), py::arg("noise_power"),
        py::arg("config") = SolverConfig{},
        "Rate-optimal PSD covariance under power and sensing-gain constraints; "
        "returns (covariance, report)");
  m.def("gaussian_randomize", &gaussian_randomize, py::arg("covariance"), py::arg("channel"),
        py::arg("target_mats"), py::arg("p_max"), py::arg("gamma"), py::arg("noise_power"),
        py::arg("num_samples"), py::arg("rng"),
        "Rank-one recovery; returns (covariance, report)");
  m.def("mrt_beamformer", &mrt_beamformer, py::arg("channel"), py::arg("p_max"));

  py::class_<ConstraintReport>(m, "ConstraintReport")
      .def_readonly("hermitian_residual", &ConstraintReport::hermitian_residual)
      .def_readonly("min_eigenvalue", &ConstraintReport::min_eigenvalue)
      .def_readonly("power_slack", &ConstraintReport::power_slack)
      .def_readonly("sensing_slacks", &ConstraintReport::sensing_slacks)
      .def_readonly("rate", &ConstraintReport::rate);
  m.def("validate_covariance", &validate_covariance, py::arg("covariance"), py::arg("channel"),
        py::arg("target_mats"), py::arg("p_max"), py::arg("gamma"), py::arg("noise_power"));

  // ---- environment ----
  py::class_<RewardWeights>(m, "RewardWeights")
      .def(py::init<>())
      .def_readwrite("alpha1", &RewardWeights::alpha1)
      .def_readwrite("alpha2", &RewardWeights::alpha2)
      .def_readwrite("alpha3", &RewardWeights::alpha3);

  py::enum_<RewardSignConvention>(m, "RewardSignConvention")
      .value("shortfall", RewardSignConvention::kShortfall)
      .value("as_printed", RewardSignConvention::kAsPrinted);

  py::enum_<InitialLayoutPolicy>(m, "InitialLayoutPolicy")
      .value("fpa_grid", InitialLayoutPolicy::kFpaGrid)
      .value("random_valid", InitialLayoutPolicy::kRandomValid);

  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init<>())
      .def_readwrite("weights", &EnvConfig::weights)
      .def_readwrite("episode_length", &EnvConfig::episode_length)
      .def_readwrite("sign_convention", &EnvConfig::sign_convention)
      .def_readwrite("initial_layout", &EnvConfig::initial_layout);

  py::class_<StepResult>(m, "StepResult")
      .def_readonly("next_state", &StepResult::next_state)
      .def_readonly("reward", &StepResult::reward)
      .def_readonly("rate", &StepResult::rate)
      .def_readonly("sensing_gains", &StepResult::sensing_gains)
      .def_readonly("sensing_violated", &StepResult::sensing_violated)
      .def_readonly("power_violated", &StepResult::power_violated)
      .def_readonly("done", &StepResult::done);

  m.def("build_state", &build_state, py::arg("layout"), py::arg("covariance"));
  m.def("apply_action", &apply_action, py::arg("layout"), py::arg("action"),
        py::arg("scenario"));
  m.def("reward", &reward, py::arg("layout"), py::arg("covariance"), py::arg("scenario"),
        py::arg("weights"), py::arg("action"),
        py::arg("convention") = RewardSignConvention::kShortfall);

  py::class_<Environment>(m, "Environment")
      .def(py::init<Scenario, int, EnvConfig>(), py::arg("scenario"), py::arg("num_bs"),
           py::arg("config") = EnvConfig{})
      .def("reset", &Environment::reset, py::arg("rng"))
      .def("set_covariance", &Environment::set_covariance, py::arg("covariance"))
      .def("step", &Environment::step, py::arg("action"))
      .def("state", &Environment::state)
      .def_property_readonly("layout", &Environment::layout)
      .def_property_readonly("covariance", &Environment::covariance)
      .def_property_readonly("scenario", &Environment::scenario)
      .def("num_bs", &Environment::num_bs)
      .def("state_dim", &Environment::state_dim)
      .def("action_dim", &Environment::action_dim)
      .def("action_bound", &Environment::action_bound);

  // ---- agent ----
  py::class_<OuNoise>(m, "OuNoise")
      .def(py::init<int, double, double>(), py::arg("dim"), py::arg("xi"), py::arg("varsigma"))
      .def("reset", &OuNoise::reset)
      .def("step", &OuNoise::step, py::arg("rng"))
      .def("state", &OuNoise::state)
      .def("set_varsigma", &OuNoise::set_varsigma, py::arg("varsigma"));

  py::class_<Transition>(m, "Transition")
      .def(py::init<>())
      .def_readwrite("state", &Transition::state)
      .def_readwrite("action", &Transition::action)
      .def_readwrite("reward", &Transition::reward)
      .def_readwrite("next_state", &Transition::next_state);

  py::class_<DdpgConfig>(m, "DdpgConfig")
      .def(py::init<>())
      .def_readwrite("state_dim", &DdpgConfig::state_dim)
      .def_readwrite("action_dim", &DdpgConfig::action_dim)
      .def_readwrite("action_bound", &DdpgConfig::action_bound)
      .def_readwrite("actor_hidden", &DdpgConfig::actor_hidden)
      .def_readwrite("critic_hidden", &DdpgConfig::critic_hidden)
      .def_readwrite("actor_lr", &DdpgConfig::actor_lr)
      .def_readwrite("critic_lr", &DdpgConfig::critic_lr)
      .def_readwrite("discount", &DdpgConfig::discount)
      .def_readwrite("tau", &DdpgConfig::tau)
      .def_readwrite("batch_size", &DdpgConfig::batch_size)
      .def_readwrite("buffer_capacity", &DdpgConfig::buffer_capacity)
      .def_readwrite("warmup", &DdpgConfig::warmup)
      .def_readwrite("ou_xi", &DdpgConfig::ou_xi)
      .def_readwrite("ou_sigma_start", &DdpgConfig::ou_sigma_start)
      .def_readwrite("ou_sigma_end", &DdpgConfig::ou_sigma_end);

  py::class_<TrainStepReport>(m, "TrainStepReport")
      .def_readonly("trained", &TrainStepReport::trained)
      .def_readonly("critic_loss", &TrainStepReport::critic_loss)
      .def_readonly("actor_objective", &TrainStepReport::actor_objective);

  py::class_<DdpgAgent>(m, "DdpgAgent")
      .def(py::init<const DdpgConfig&, Rng&>(), py::arg("config"), py::arg("rng"))
      .def("act", py::overload_cast<const Eigen::VectorXd&>(&DdpgAgent::act, py::const_),
           py::arg("state"), "Deterministic policy action")
      .def("act_noisy",
           py::overload_cast<const Eigen::VectorXd&, OuNoise&, Rng&>(&DdpgAgent::act,
                                                                     py::const_),
           py::arg("state"), py::arg("noise"), py::arg("rng"))
      .def("remember", &DdpgAgent::remember, py::arg("transition"))
      .def("ready_to_train", &DdpgAgent::ready_to_train)
      .def("train_step", &DdpgAgent::train_step, py::arg("rng"))
      .def_property_readonly("config", &DdpgAgent::config)
      .def_property_readonly("buffer_size",
                             [](const DdpgAgent& a) { return a.buffer().size(); })
      .def("save", &DdpgAgent::save, py::arg("path"))
      .def_static("load", &DdpgAgent::load, py::arg("path"));

  py::class_<EpisodeRow>(m, "EpisodeRow")
      .def_readonly("episode", &EpisodeRow::episode)
      .def_readonly("total_return", &EpisodeRow::total_return)
      .def_readonly("mean_reward", &EpisodeRow::mean_reward)
      .def_readonly("final_rate", &EpisodeRow::final_rate)
      .def_readonly("final_sensing_slacks", &EpisodeRow::final_sensing_slacks);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("log", &TrainResult::log)
      .def_readonly("best_layout", &TrainResult::best_layout)
      .def_readonly("best_reward", &TrainResult::best_reward)
      .def_readonly("best_found", &TrainResult::best_found);

  m.def("run_episodes", &run_episodes, py::arg("agent"), py::arg("env"), py::arg("episodes"),
        py::arg("steps_per_episode"), py::arg("rng"));

  // ---- alternating optimization ----
  py::class_<BcdConfig>(m, "BcdConfig")
      .def(py::init<>())
      .def_readwrite("num_bs", &BcdConfig::num_bs)
      .def_readwrite("max_outer_iters", &BcdConfig::max_outer_iters)
      .def_readwrite("rate_tolerance", &BcdConfig::rate_tolerance)
      .def_readwrite("ddpg_episodes", &BcdConfig::ddpg_episodes)
      .def_readwrite("steps_per_episode", &BcdConfig::steps_per_episode)
      .def_readwrite("randomization_samples", &BcdConfig::randomization_samples)
      .def_readwrite("solver", &BcdConfig::solver)
      .def_readwrite("agent", &BcdConfig::agent)
      .def_readwrite("env", &BcdConfig::env);

  py::class_<BcdIteration>(m, "BcdIteration")
      .def_readonly("iteration", &BcdIteration::iteration)
      .def_readonly("relaxed_rate", &BcdIteration::relaxed_rate)
      .def_readonly("recovered_rate", &BcdIteration::recovered_rate)
      .def_readonly("sensing_slacks", &BcdIteration::sensing_slacks)
      .def_readonly("best_rate", &BcdIteration::best_rate)
      .def_readonly("layout_adopted", &BcdIteration::layout_adopted);

  py::class_<OptResult>(m, "OptResult")
      .def_readonly("best_layout", &OptResult::best_layout)
      .def_readonly("best_covariance", &OptResult::best_covariance)
      .def_readonly("best_rate", &OptResult::best_rate)
      .def_readonly("relaxed_rate", &OptResult::relaxed_rate)
      .def_readonly("trace", &OptResult::trace)
      .def_readonly("status", &OptResult::status)
      .def_readonly("infeasibility_certificate", &OptResult::infeasibility_certificate)
      .def_readonly("certificate_bound", &OptResult::certificate_bound);

  m.def("optimize", &optimize, py::arg("scenario"), py::arg("config"), py::arg("rng"),
        "Alternating covariance solve / position search; best-so-far never regresses");
  m.def("fpa_baseline", &fpa_baseline, py::arg("scenario"), py::arg("config"), py::arg("rng"),
        "One covariance solve at the fixed half-wavelength grid");

  // ---- experiments ----
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("num_bs", &ExperimentConfig::num_bs)
      .def_readwrite("num_targets", &ExperimentConfig::num_targets)
      .def_readwrite("num_tx_paths", &ExperimentConfig::num_tx_paths)
      .def_readwrite("num_rx_paths", &ExperimentConfig::num_rx_paths)
      .def_readwrite("paths_per_target", &ExperimentConfig::paths_per_target)
      .def_readwrite("wavelength", &ExperimentConfig::wavelength)
      .def_readwrite("p_max", &ExperimentConfig::p_max)
      .def_readwrite("rician_tau", &ExperimentConfig::rician_tau)
      .def_readwrite("gamma", &ExperimentConfig::gamma)
      .def_readwrite("d_s", &ExperimentConfig::d_s)
      .def_readwrite("region_side", &ExperimentConfig::region_side)
      .def_readwrite("snr_db_list", &ExperimentConfig::snr_db_list)
      .def_readwrite("num_scenarios", &ExperimentConfig::num_scenarios)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("run_fas", &ExperimentConfig::run_fas)
      .def_readwrite("run_fpa", &ExperimentConfig::run_fpa)
      .def_readwrite("bcd", &ExperimentConfig::bcd)
      .def_readwrite("num_workers", &ExperimentConfig::num_workers)
      .def_readwrite("record_timings", &ExperimentConfig::record_timings)
      .def("noise_power_for", &ExperimentConfig::noise_power_for, py::arg("snr_db"))
      .def("scenario_config", &ExperimentConfig::scenario_config)
      .def("validate", &ExperimentConfig::validate);

  m.def("parse_experiment_config", &parse_experiment_config, py::arg("json_text"));
  m.def("load_experiment_config", &load_experiment_config, py::arg("path"));
  m.def("to_json_string", &to_json_string, py::arg("config"));
  m.def("config_hash", &config_hash, py::arg("config"));
  m.def("config_hash_hex", &config_hash_hex, py::arg("config"));

  py::class_<ResultRow>(m, "ResultRow")
      .def(py::init<>())
      .def_readwrite("scenario_id", &ResultRow::scenario_id)
      .def_readwrite("method", &ResultRow::method)
      .def_readwrite("snr_db", &ResultRow::snr_db)
      .def_readwrite("rate", &ResultRow::rate)
      .def_readwrite("relaxed_rate", &ResultRow::relaxed_rate)
      .def_readwrite("min_sensing_slack", &ResultRow::min_sensing_slack)
      .def_readwrite("sensing_slacks", &ResultRow::sensing_slacks)
      .def_readwrite("wall_time_s", &ResultRow::wall_time_s)
      .def_readwrite("seed", &ResultRow::seed)
      .def_readwrite("status", &ResultRow::status);

  py::class_<Aggregate>(m, "Aggregate")
      .def_readonly("method", &Aggregate::method)
      .def_readonly("snr_db", &Aggregate::snr_db)
      .def_readonly("avg_rate", &Aggregate::avg_rate)
      .def_readonly("max_rate", &Aggregate::max_rate)
      .def_readonly("count", &Aggregate::count);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("aggregates", &SweepResult::aggregates)
      .def_readonly("num_failed", &SweepResult::num_failed);

  m.def("run_sweep", &run_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(),
        "Every enabled method over all scenarios and SNR points");
  m.def("run_single_scenario", &run_single_scenario, py::arg("config"), py::arg("scenario_id"),
        py::call_guard<py::gil_scoped_release>());
  m.def("compute_aggregates", &compute_aggregates, py::arg("config"), py::arg("rows"));
  m.def("to_csv", &to_csv, py::arg("rows"));
  m.def("parse_csv", &parse_csv, py::arg("text"));
  m.def("results_to_json", &results_to_json, py::arg("config"), py::arg("result"),
        py::arg("timestamp"));
  m.def("results_to_svg", &results_to_svg, py::arg("config"), py::arg("result"));
  m.def("utc_timestamp", &utc_timestamp);

  m.attr("METHOD_FAS") = kMethodFas;
  m.attr("METHOD_FPA") = kMethodFpa;
  m.attr("__version__") = "0.1.0";
}
