#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fasisac/bcd.hpp"
#include "fasisac/scenario.hpp"

namespace fasisac {

inline constexpr const char* kVersionString = "fasisac 0.1.0";
inline constexpr const char* kMethodFas = "fas_bcd_drl";
inline constexpr const char* kMethodFpa = "fpa";

/// Everything a sweep needs. All fields have working defaults; the JSON
/// config file may override any subset (unknown keys are rejected).
///
/// Seed derivation, documented so results are reproducible anywhere:
///   scenario_seed(i) = derive_seed(master_seed, i)   (splitmix64 mix)
///   run_seed(i, q)   = derive_seed(scenario_seed(i), q)
/// where i is the scenario id and q the index into snr_db_list. The scenario
/// itself is drawn from Rng(scenario_seed(i)) once and reused across SNRs;
/// every method at (i, q) starts from a fresh Rng(run_seed(i, q)), so the
/// fixed-position baseline and the movable-antenna run see identical solver
/// randomness and the latter can never report a lower rate.
struct ExperimentConfig {
  int num_bs = 4;            // N transmit antennas
  int num_targets = 2;       // K sensing targets
  int num_tx_paths = 3;      // D departure paths
  int num_rx_paths = 3;      // I arrival paths
  int paths_per_target = 3;  // P paths per target
  double wavelength = 1.0;
  double p_max = 1.0;
  double rician_tau = 1.0;
  double gamma = 0.0;            // sensing gain floor
  double d_s = 0.5;              // min antenna spacing, default wavelength/2
  double region_side = 4.0;      // movement square side, default 4 * wavelength
  std::vector<double> snr_db_list = {0.0, 10.0, 20.0, 30.0};
  int num_scenarios = 20;
  std::uint64_t master_seed = 1;
  bool run_fas = true;  // movable antennas, alternating solver + policy search
  bool run_fpa = true;  // fixed half-wavelength grid
  BcdConfig bcd;        // nests solver / agent / environment settings

  // Execution details; they never change emitted numbers (wall_time_s
  // excepted) and are excluded from config_hash.
  int num_workers = 1;
  bool record_timings = false;  // false -> wall_time_s column written as 0

  /// Noise power for one sweep point: sigma^2 = p_max / 10^(snr_db/10).
  double noise_power_for(double snr_db) const;
  ScenarioConfig scenario_config() const;
  void validate() const;
};

/// Parse a JSON config. Defaults fill absent keys; unknown keys, wrong types
/// and invalid values throw ConfigError naming the offending key path (parse
/// errors carry the byte offset).
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical JSON form (sorted keys, full fidelity). Two configs with equal
/// canonical forms produce identical sweep numbers.
std::string to_json_string(const ExperimentConfig& config);

/// FNV-1a 64-bit hash of the canonical form minus the execution-detail keys
/// (num_workers, record_timings): a stable identifier of the experiment.
std::uint64_t config_hash(const ExperimentConfig& config);
std::string config_hash_hex(const ExperimentConfig& config);

struct ResultRow {
  int scenario_id = 0;
  std::string method;  // kMethodFas or kMethodFpa
  double snr_db = 0.0;
  double rate = 0.0;          // bits/s/Hz of the recovered rank-one point
  double relaxed_rate = 0.0;  // upper bound from the relaxed solve
  double min_sensing_slack = 0.0;
  std::vector<double> sensing_slacks;  // full vector (JSON only; CSV keeps the min)
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;  // run_seed consumed by this row's optimizer call
  std::string status = "ok";
};

struct Aggregate {
  std::string method;
  double snr_db = 0.0;
  double avg_rate = 0.0;  // over rows with status == "ok"
  double max_rate = 0.0;
  int count = 0;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // sorted by (scenario_id, snr index, method)
  std::vector<Aggregate> aggregates;
  int num_failed = 0;  // rows with status != "ok"
};

/// Runs every enabled method on num_scenarios x |snr_db_list| points with a
/// bounded scenario-level worker pool. Row order is independent of thread
/// scheduling; per-point failures become rows with a non-"ok" status and
/// never abort the sweep.
SweepResult run_sweep(const ExperimentConfig& config);

/// All rows of one scenario id (every SNR x enabled method), exactly as
/// run_sweep would produce them. The id may lie outside
/// [0, num_scenarios): it only feeds the seed derivation.
std::vector<ResultRow> run_single_scenario(const ExperimentConfig& config, int scenario_id);

/// Per-(method, SNR) average/maximum rate over rows with status "ok".
std::vector<Aggregate> compute_aggregates(const ExperimentConfig& config,
                                          const std::vector<ResultRow>& rows);

/// CSV with the fixed header
///   scenario_id,method,snr_db,rate_bps_hz,relaxed_rate_bps_hz,
///   min_sensing_slack,wall_time_s,seed
/// Numbers use shortest round-trip formatting, so parse_csv followed by
/// to_csv reproduces the input byte for byte.
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Result envelope: {config, rows, aggregates, version, timestamp}.
std::string results_to_json(const ExperimentConfig& config, const SweepResult& result,
                            const std::string& timestamp);

/// Rate-vs-SNR line plot (average solid, maximum dashed, one color per
/// method). Valid standalone XML; the config hash is embedded as an
/// attribute on the root element.
std::string results_to_svg(const ExperimentConfig& config, const SweepResult& result);

/// Current UTC time as an ISO-8601 string, e.g. "2025-01-31T12:00:00Z".
std::string utc_timestamp();

}  // namespace fasisac
