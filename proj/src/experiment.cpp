#include "fasisac/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>
#include <thread>

#include "fasisac/beamforming.hpp"
#include "fasisac/channel.hpp"
#include "fasisac/errors.hpp"
#include "json.hpp"

namespace fasisac {
namespace {

using nlohmann::json;

constexpr const char* kCsvHeader =
    "scenario_id,method,snr_db,rate_bps_hz,relaxed_rate_bps_hz,min_sensing_slack,"
    "wall_time_s,seed";

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      fail(path, "unknown key \"" + it.key() + "\"");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> as_int_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_int(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Applies f to obj[key] when present.
template <class F>
void with(const json& obj, const char* key, const std::string& path, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it, path + "." + key);
}

void parse_bcd(const json& j, const std::string& path, BcdConfig& bcd) {
  check_keys(j, path,
             {"max_outer_iters", "rate_tolerance", "ddpg_episodes", "steps_per_episode",
              "randomization_samples"});
  with(j, "max_outer_iters", path,
       [&](const json& v, const std::string& p) { bcd.max_outer_iters = as_int(v, p); });
  with(j, "rate_tolerance", path,
       [&](const json& v, const std::string& p) { bcd.rate_tolerance = as_number(v, p); });
  with(j, "ddpg_episodes", path,
       [&](const json& v, const std::string& p) { bcd.ddpg_episodes = as_int(v, p); });
  with(j, "steps_per_episode", path,
       [&](const json& v, const std::string& p) { bcd.steps_per_episode = as_int(v, p); });
  with(j, "randomization_samples", path, [&](const json& v, const std::string& p) {
    bcd.randomization_samples = as_int(v, p);
  });
}

void parse_agent(const json& j, const std::string& path, DdpgConfig& a) {
  check_keys(j, path,
             {"actor_hidden", "critic_hidden", "actor_lr", "critic_lr", "discount", "tau",
              "batch_size", "buffer_capacity", "warmup", "ou_xi", "ou_sigma_start",
              "ou_sigma_end"});
  with(j, "actor_hidden", path,
       [&](const json& v, const std::string& p) { a.actor_hidden = as_int_list(v, p); });
  with(j, "critic_hidden", path,
       [&](const json& v, const std::string& p) { a.critic_hidden = as_int_list(v, p); });
  with(j, "actor_lr", path,
       [&](const json& v, const std::string& p) { a.actor_lr = as_number(v, p); });
  with(j, "critic_lr", path,
       [&](const json& v, const std::string& p) { a.critic_lr = as_number(v, p); });
  with(j, "discount", path,
       [&](const json& v, const std::string& p) { a.discount = as_number(v, p); });
  with(j, "tau", path, [&](const json& v, const std::string& p) { a.tau = as_number(v, p); });
  with(j, "batch_size", path,
       [&](const json& v, const std::string& p) { a.batch_size = as_int(v, p); });
  with(j, "buffer_capacity", path, [&](const json& v, const std::string& p) {
    a.buffer_capacity = static_cast<std::size_t>(as_u64(v, p));
  });
  with(j, "warmup", path, [&](const json& v, const std::string& p) { a.warmup = as_int(v, p); });
  with(j, "ou_xi", path, [&](const json& v, const std::string& p) { a.ou_xi = as_number(v, p); });
  with(j, "ou_sigma_start", path,
       [&](const json& v, const std::string& p) { a.ou_sigma_start = as_number(v, p); });
  with(j, "ou_sigma_end", path,
       [&](const json& v, const std::string& p) { a.ou_sigma_end = as_number(v, p); });
}

void parse_solver(const json& j, const std::string& path, SolverConfig& s) {
  check_keys(j, path,
             {"barrier_t0", "barrier_reduction", "gap_tol", "newton_tol",
              "max_newton_per_stage", "max_total_newton"});
  with(j, "barrier_t0", path,
       [&](const json& v, const std::string& p) { s.barrier_t0 = as_number(v, p); });
  with(j, "barrier_reduction", path,
       [&](const json& v, const std::string& p) { s.barrier_reduction = as_number(v, p); });
  with(j, "gap_tol", path,
       [&](const json& v, const std::string& p) { s.gap_tol = as_number(v, p); });
  with(j, "newton_tol", path,
       [&](const json& v, const std::string& p) { s.newton_tol = as_number(v, p); });
  with(j, "max_newton_per_stage", path,
       [&](const json& v, const std::string& p) { s.max_newton_per_stage = as_int(v, p); });
  with(j, "max_total_newton", path,
       [&](const json& v, const std::string& p) { s.max_total_newton = as_int(v, p); });
}

void parse_env(const json& j, const std::string& path, EnvConfig& e) {
  check_keys(j, path,
             {"sensing_penalty", "power_penalty", "movement_penalty", "sign_convention",
              "initial_layout"});
  with(j, "sensing_penalty", path,
       [&](const json& v, const std::string& p) { e.weights.alpha1 = as_number(v, p); });
  with(j, "power_penalty", path,
       [&](const json& v, const std::string& p) { e.weights.alpha2 = as_number(v, p); });
  with(j, "movement_penalty", path,
       [&](const json& v, const std::string& p) { e.weights.alpha3 = as_number(v, p); });
  with(j, "sign_convention", path, [&](const json& v, const std::string& p) {
    const std::string s = as_string(v, p);
    if (s == "shortfall")
      e.sign_convention = RewardSignConvention::kShortfall;
    else if (s == "as_printed")
      e.sign_convention = RewardSignConvention::kAsPrinted;
    else
      fail(p, "expected \"shortfall\" or \"as_printed\"");
  });
  with(j, "initial_layout", path, [&](const json& v, const std::string& p) {
    const std::string s = as_string(v, p);
    if (s == "grid")
      e.initial_layout = InitialLayoutPolicy::kFpaGrid;
    else if (s == "random")
      e.initial_layout = InitialLayoutPolicy::kRandomValid;
    else
      fail(p, "expected \"grid\" or \"random\"");
  });
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("config", "top level must be an object");
  check_keys(j, "config",
             {"num_bs", "num_targets", "num_tx_paths", "num_rx_paths", "paths_per_target",
              "wavelength", "p_max", "rician_tau", "gamma", "d_s", "region_side",
              "snr_db_list", "num_scenarios", "master_seed", "run_fas", "run_fpa", "bcd",
              "agent", "solver", "env", "num_workers", "record_timings"});

  ExperimentConfig cfg;
  with(j, "wavelength", "config",
       [&](const json& v, const std::string& p) { cfg.wavelength = as_number(v, p); });
  // Geometry defaults track the wavelength unless overridden below.
  cfg.d_s = 0.5 * cfg.wavelength;
  cfg.region_side = 4.0 * cfg.wavelength;

  with(j, "num_bs", "config",
       [&](const json& v, const std::string& p) { cfg.num_bs = as_int(v, p); });
  with(j, "num_targets", "config",
       [&](const json& v, const std::string& p) { cfg.num_targets = as_int(v, p); });
  with(j, "num_tx_paths", "config",
       [&](const json& v, const std::string& p) { cfg.num_tx_paths = as_int(v, p); });
  with(j, "num_rx_paths", "config",
       [&](const json& v, const std::string& p) { cfg.num_rx_paths = as_int(v, p); });
  with(j, "paths_per_target", "config",
       [&](const json& v, const std::string& p) { cfg.paths_per_target = as_int(v, p); });
  with(j, "p_max", "config",
       [&](const json& v, const std::string& p) { cfg.p_max = as_number(v, p); });
  with(j, "rician_tau", "config",
       [&](const json& v, const std::string& p) { cfg.rician_tau = as_number(v, p); });
  with(j, "gamma", "config",
       [&](const json& v, const std::string& p) { cfg.gamma = as_number(v, p); });
  with(j, "d_s", "config",
       [&](const json& v, const std::string& p) { cfg.d_s = as_number(v, p); });
  with(j, "region_side", "config",
       [&](const json& v, const std::string& p) { cfg.region_side = as_number(v, p); });
  with(j, "snr_db_list", "config",
       [&](const json& v, const std::string& p) { cfg.snr_db_list = as_number_list(v, p); });
  with(j, "num_scenarios", "config",
       [&](const json& v, const std::string& p) { cfg.num_scenarios = as_int(v, p); });
  with(j, "master_seed", "config",
       [&](const json& v, const std::string& p) { cfg.master_seed = as_u64(v, p); });
  with(j, "run_fas", "config",
       [&](const json& v, const std::string& p) { cfg.run_fas = as_bool(v, p); });
  with(j, "run_fpa", "config",
       [&](const json& v, const std::string& p) { cfg.run_fpa = as_bool(v, p); });
  with(j, "num_workers", "config",
       [&](const json& v, const std::string& p) { cfg.num_workers = as_int(v, p); });
  with(j, "record_timings", "config",
       [&](const json& v, const std::string& p) { cfg.record_timings = as_bool(v, p); });

  with(j, "bcd", "config",
       [&](const json& v, const std::string& p) { parse_bcd(v, p, cfg.bcd); });
  with(j, "agent", "config",
       [&](const json& v, const std::string& p) { parse_agent(v, p, cfg.bcd.agent); });
  with(j, "solver", "config",
       [&](const json& v, const std::string& p) { parse_solver(v, p, cfg.bcd.solver); });
  with(j, "env", "config",
       [&](const json& v, const std::string& p) { parse_env(v, p, cfg.bcd.env); });

  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["num_bs"] = cfg.num_bs;
  j["num_targets"] = cfg.num_targets;
  j["num_tx_paths"] = cfg.num_tx_paths;
  j["num_rx_paths"] = cfg.num_rx_paths;
  j["paths_per_target"] = cfg.paths_per_target;
  j["wavelength"] = cfg.wavelength;
  j["p_max"] = cfg.p_max;
  j["rician_tau"] = cfg.rician_tau;
  j["gamma"] = cfg.gamma;
  j["d_s"] = cfg.d_s;
  j["region_side"] = cfg.region_side;
  j["snr_db_list"] = cfg.snr_db_list;
  j["num_scenarios"] = cfg.num_scenarios;
  j["master_seed"] = cfg.master_seed;
  j["run_fas"] = cfg.run_fas;
  j["run_fpa"] = cfg.run_fpa;
  j["num_workers"] = cfg.num_workers;
  j["record_timings"] = cfg.record_timings;
  j["bcd"] = {{"max_outer_iters", cfg.bcd.max_outer_iters},
              {"rate_tolerance", cfg.bcd.rate_tolerance},
              {"ddpg_episodes", cfg.bcd.ddpg_episodes},
              {"steps_per_episode", cfg.bcd.steps_per_episode},
              {"randomization_samples", cfg.bcd.randomization_samples}};
  const DdpgConfig& a = cfg.bcd.agent;
  j["agent"] = {{"actor_hidden", a.actor_hidden},
                {"critic_hidden", a.critic_hidden},
                {"actor_lr", a.actor_lr},
                {"critic_lr", a.critic_lr},
                {"discount", a.discount},
                {"tau", a.tau},
                {"batch_size", a.batch_size},
                {"buffer_capacity", a.buffer_capacity},
                {"warmup", a.warmup},
                {"ou_xi", a.ou_xi},
                {"ou_sigma_start", a.ou_sigma_start},
                {"ou_sigma_end", a.ou_sigma_end}};
  const SolverConfig& s = cfg.bcd.solver;
  j["solver"] = {{"barrier_t0", s.barrier_t0},
                 {"barrier_reduction", s.barrier_reduction},
                 {"gap_tol", s.gap_tol},
                 {"newton_tol", s.newton_tol},
                 {"max_newton_per_stage", s.max_newton_per_stage},
                 {"max_total_newton", s.max_total_newton}};
  const EnvConfig& e = cfg.bcd.env;
  j["env"] = {
      {"sensing_penalty", e.weights.alpha1},
      {"power_penalty", e.weights.alpha2},
      {"movement_penalty", e.weights.alpha3},
      {"sign_convention",
       e.sign_convention == RewardSignConvention::kShortfall ? "shortfall" : "as_printed"},
      {"initial_layout",
       e.initial_layout == InitialLayoutPolicy::kFpaGrid ? "grid" : "random"}};
  return j;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double ExperimentConfig::noise_power_for(double snr_db) const {
  return p_max / std::pow(10.0, snr_db / 10.0);
}

ScenarioConfig ExperimentConfig::scenario_config() const {
  ScenarioConfig s;
  s.num_tx_paths = num_tx_paths;
  s.num_rx_paths = num_rx_paths;
  s.num_targets = num_targets;
  s.paths_per_target = paths_per_target;
  s.rician_tau = rician_tau;
  s.wavelength = wavelength;
  s.noise_power = 1.0;  // replaced per sweep point
  s.p_max = p_max;
  s.gamma = gamma;
  s.d_s = d_s;
  s.region_side = region_side;
  return s;
}

void ExperimentConfig::validate() const {
  if (num_bs < 1) throw ConfigError("config.num_bs: must be >= 1");
  if (num_targets < 1) throw ConfigError("config.num_targets: must be >= 1");
  if (num_tx_paths < 1) throw ConfigError("config.num_tx_paths: must be >= 1");
  if (num_rx_paths < 1) throw ConfigError("config.num_rx_paths: must be >= 1");
  if (paths_per_target < 1) throw ConfigError("config.paths_per_target: must be >= 1");
  if (!(wavelength > 0.0)) throw ConfigError("config.wavelength: must be > 0");
  if (!(p_max > 0.0)) throw ConfigError("config.p_max: must be > 0");
  if (!(rician_tau > 0.0)) throw ConfigError("config.rician_tau: must be > 0");
  if (gamma < 0.0) throw ConfigError("config.gamma: must be >= 0");
  if (!(d_s > 0.0)) throw ConfigError("config.d_s: must be > 0");
  if (!(region_side > 0.0)) throw ConfigError("config.region_side: must be > 0");
  if (snr_db_list.empty()) throw ConfigError("config.snr_db_list: must not be empty");
  if (num_scenarios < 1) throw ConfigError("config.num_scenarios: must be >= 1");
  if (num_workers < 1) throw ConfigError("config.num_workers: must be >= 1");
  if (!run_fas && !run_fpa)
    throw ConfigError("config: at least one of run_fas / run_fpa must be true");
  if (bcd.env.weights.alpha1 < 0.0 || bcd.env.weights.alpha2 < 0.0 ||
      bcd.env.weights.alpha3 < 0.0)
    throw ConfigError("config.env: penalty weights must be >= 0");
  bcd.validate();
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string to_json_string(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  json j = config_to_json(config);
  j.erase("num_workers");
  j.erase("record_timings");
  return fnv1a(j.dump());
}

std::string config_hash_hex(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  return std::string(buf);
}

namespace {

std::vector<std::string> enabled_methods(const ExperimentConfig& config) {
  std::vector<std::string> methods;
  if (config.run_fas) methods.push_back(kMethodFas);
  if (config.run_fpa) methods.push_back(kMethodFpa);
  return methods;
}

}  // namespace

std::vector<ResultRow> run_single_scenario(const ExperimentConfig& config, int scenario_id) {
  config.validate();
  BcdConfig bcd = config.bcd;
  bcd.num_bs = config.num_bs;
  const std::vector<std::string> methods = enabled_methods(config);
  const int num_snr = static_cast<int>(config.snr_db_list.size());
  const int num_methods = static_cast<int>(methods.size());
  const ScenarioConfig scfg = config.scenario_config();

  const std::uint64_t scenario_seed = derive_seed(config.master_seed, scenario_id);
  Scenario base;
  std::string base_error;
  try {
    Rng srng(scenario_seed);
    base = sample_scenario(srng, scfg);
  } catch (const std::exception& e) {
    base_error = e.what();
  }

  std::vector<ResultRow> rows(static_cast<std::size_t>(num_snr) * num_methods);
  for (int q = 0; q < num_snr; ++q) {
    const std::uint64_t run_seed = derive_seed(scenario_seed, q);
    for (int m = 0; m < num_methods; ++m) {
      ResultRow& row = rows[static_cast<std::size_t>(q) * num_methods + m];
      row.scenario_id = scenario_id;
      row.method = methods[m];
      row.snr_db = config.snr_db_list[q];
      row.seed = run_seed;
      if (!base_error.empty()) {
        row.status = base_error;
        continue;
      }
      Scenario sc = base;
      sc.noise_power = config.noise_power_for(row.snr_db);
      try {
        Rng rng(run_seed);
        const auto t0 = std::chrono::steady_clock::now();
        const OptResult res =
            row.method == kMethodFpa ? fpa_baseline(sc, bcd, rng) : optimize(sc, bcd, rng);
        if (config.record_timings) {
          row.wall_time_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        row.relaxed_rate = res.relaxed_rate;
        if (res.status == SolveStatus::kOptimal) {
          row.rate = res.best_rate;
          const ConstraintReport rep = validate_covariance(
              res.best_covariance, channel_vector(res.best_layout, sc),
              target_matrices(res.best_layout, sc), sc.p_max, sc.gamma, sc.noise_power);
          row.sensing_slacks = rep.sensing_slacks;
          row.min_sensing_slack =
              rep.sensing_slacks.empty()
                  ? 0.0
                  : *std::min_element(rep.sensing_slacks.begin(), rep.sensing_slacks.end());
        } else {
          row.status = to_string(res.status);
        }
      } catch (const std::exception& e) {
        row.status = e.what();
        row.rate = 0.0;
        row.relaxed_rate = 0.0;
      }
    }
  }
  return rows;
}

std::vector<Aggregate> compute_aggregates(const ExperimentConfig& config,
                                          const std::vector<ResultRow>& rows) {
  std::vector<Aggregate> aggregates;
  for (const std::string& method : enabled_methods(config)) {
    for (double snr : config.snr_db_list) {
      Aggregate agg;
      agg.method = method;
      agg.snr_db = snr;
      double sum = 0.0;
      for (const ResultRow& row : rows) {
        if (row.method != method || row.snr_db != snr || row.status != "ok") continue;
        sum += row.rate;
        agg.max_rate = std::max(agg.max_rate, row.rate);
        ++agg.count;
      }
      if (agg.count > 0) agg.avg_rate = sum / agg.count;
      aggregates.push_back(agg);
    }
  }
  return aggregates;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const int num_scen = config.num_scenarios;
  const int per_scenario = static_cast<int>(config.snr_db_list.size()) *
                           static_cast<int>(enabled_methods(config).size());

  std::vector<ResultRow> rows(static_cast<std::size_t>(num_scen) * per_scenario);
  auto run_scenario = [&](int sid) {
    std::vector<ResultRow> scenario_rows = run_single_scenario(config, sid);
    std::move(scenario_rows.begin(), scenario_rows.end(),
              rows.begin() + static_cast<std::ptrdiff_t>(sid) * per_scenario);
  };

  const int workers = std::min(config.num_workers, num_scen);
  if (workers <= 1) {
    for (int sid = 0; sid < num_scen; ++sid) run_scenario(sid);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int sid; (sid = next.fetch_add(1)) < num_scen;) run_scenario(sid);
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  out.rows = std::move(rows);
  out.aggregates = compute_aggregates(config, out.rows);
  for (const ResultRow& row : out.rows)
    if (row.status != "ok") ++out.num_failed;
  return out;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const ResultRow& row : rows) {
    out += std::to_string(row.scenario_id);
    out += ',';
    out += row.method;
    out += ',';
    out += format_double(row.snr_db);
    out += ',';
    out += format_double(row.rate);
    out += ',';
    out += format_double(row.relaxed_rate);
    out += ',';
    out += format_double(row.min_sensing_slack);
    out += ',';
    out += format_double(row.wall_time_s);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_csv_double(std::string_view field, const char* column, int line_no) {
  double value = 0.0;
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || p != field.data() + field.size())
    throw ConfigError("csv line " + std::to_string(line_no) + ": bad number in column " +
                      column + ": \"" + std::string(field) + "\"");
  return value;
}

template <class T>
T parse_csv_integer(std::string_view field, const char* column, int line_no) {
  T value{};
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || p != field.data() + field.size())
    throw ConfigError("csv line " + std::to_string(line_no) + ": bad integer in column " +
                      column + ": \"" + std::string(field) + "\"");
  return value;
}

}  // namespace

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kCsvHeader)
    throw ConfigError("csv line 1: header must be exactly \"" + std::string(kCsvHeader) + "\"");

  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::vector<std::string_view> f = split(lines[i], ',');
    if (f.size() != 8)
      throw ConfigError("csv line " + std::to_string(line_no) + ": expected 8 fields, got " +
                        std::to_string(f.size()));
    ResultRow row;
    row.scenario_id = parse_csv_integer<int>(f[0], "scenario_id", line_no);
    row.method = std::string(f[1]);
    if (row.method.empty())
      throw ConfigError("csv line " + std::to_string(line_no) + ": empty method");
    row.snr_db = parse_csv_double(f[2], "snr_db", line_no);
    row.rate = parse_csv_double(f[3], "rate_bps_hz", line_no);
    row.relaxed_rate = parse_csv_double(f[4], "relaxed_rate_bps_hz", line_no);
    row.min_sensing_slack = parse_csv_double(f[5], "min_sensing_slack", line_no);
    row.wall_time_s = parse_csv_double(f[6], "wall_time_s", line_no);
    row.seed = parse_csv_integer<std::uint64_t>(f[7], "seed", line_no);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string results_to_json(const ExperimentConfig& config, const SweepResult& result,
                            const std::string& timestamp) {
  json j;
  j["config"] = config_to_json(config);
  j["version"] = kVersionString;
  j["timestamp"] = timestamp;
  const std::string hash_hex = config_hash_hex(config);
  json rows = json::array();
  for (const ResultRow& row : result.rows) {
    rows.push_back({{"scenario_id", row.scenario_id},
                    {"method", row.method},
                    {"snr_db", row.snr_db},
                    {"rate_bps_hz", row.rate},
                    {"relaxed_rate_bps_hz", row.relaxed_rate},
                    {"sensing_slacks", row.sensing_slacks},
                    {"min_sensing_slack", row.min_sensing_slack},
                    {"wall_time_s", row.wall_time_s},
                    {"seed", row.seed},
                    {"status", row.status},
                    {"config_hash", hash_hex}});
  }
  j["rows"] = std::move(rows);
  json aggs = json::array();
  for (const Aggregate& a : result.aggregates) {
    aggs.push_back({{"method", a.method},
                    {"snr_db", a.snr_db},
                    {"avg_rate_bps_hz", a.avg_rate},
                    {"max_rate_bps_hz", a.max_rate},
                    {"count", a.count}});
  }
  j["aggregates"] = std::move(aggs);
  return j.dump(2) + "\n";
}

std::string results_to_svg(const ExperimentConfig& config, const SweepResult& result) {
  constexpr double kWidth = 720.0, kHeight = 480.0;
  constexpr double kLeft = 72.0, kRight = 24.0, kTop = 48.0, kBottom = 56.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = 0.0, x_max = 1.0, y_max = 1.0;
  bool have_points = false;
  for (const Aggregate& a : result.aggregates) {
    if (a.count == 0) continue;
    if (!have_points) {
      x_min = x_max = a.snr_db;
      have_points = true;
    } else {
      x_min = std::min(x_min, a.snr_db);
      x_max = std::max(x_max, a.snr_db);
    }
    y_max = std::max(y_max, a.max_rate);
  }
  if (x_min == x_max) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  y_max *= 1.05;

  const auto to_x = [&](double snr) { return kLeft + (snr - x_min) / (x_max - x_min) * plot_w; };
  const auto to_y = [&](double rate) { return kTop + plot_h - rate / y_max * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" data-config-hash=\""
      << config_hash_hex(config) << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << kWidth / 2
      << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << "Communication rate vs SNR (hash " << config_hash_hex(config) << ")</text>\n";

  // Axes and ticks.
  svg << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double frac = t / 5.0;
    const double x = kLeft + frac * plot_w;
    const double y = kTop + plot_h - frac * plot_h;
    const double snr = x_min + frac * (x_max - x_min);
    const double rate = frac * y_max;
    svg << "  <line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << x << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(std::round(snr * 100.0) / 100.0) << "</text>\n";
    svg << "  <line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\""
        << y << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(std::round(rate * 100.0) / 100.0) << "</text>\n";
  }
  svg << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">SNR (dB)"
      << "</text>\n";
  svg << "  <text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">rate (bits/s/Hz)</text>\n";

  const auto color_of = [](const std::string& method) {
    return method == std::string(kMethodFas) ? std::string("#1f77b4") : std::string("#d62728");
  };
  std::vector<std::string> methods;
  for (const Aggregate& a : result.aggregates)
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end())
      methods.push_back(a.method);

  double legend_y = kTop + 14.0;
  for (const std::string& method : methods) {
    const std::string color = color_of(method);
    for (const bool use_max : {false, true}) {
      std::ostringstream points;
      int n = 0;
      for (const Aggregate& a : result.aggregates) {
        if (a.method != method || a.count == 0) continue;
        if (n++ > 0) points << ' ';
        points << to_x(a.snr_db) << ',' << to_y(use_max ? a.max_rate : a.avg_rate);
      }
      if (n == 0) continue;
      svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
      if (use_max) svg << " stroke-dasharray=\"6 4\"";
      svg << " points=\"" << points.str() << "\"/>\n";
      for (const Aggregate& a : result.aggregates) {
        if (a.method != method || a.count == 0) continue;
        svg << "  <circle cx=\"" << to_x(a.snr_db) << "\" cy=\""
            << to_y(use_max ? a.max_rate : a.avg_rate) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
      // Legend entry.
      svg << "  <line x1=\"" << kLeft + 12 << "\" y1=\"" << legend_y << "\" x2=\"" << kLeft + 44
          << "\" y2=\"" << legend_y << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
      if (use_max) svg << " stroke-dasharray=\"6 4\"";
      svg << "/>\n";
      svg << "  <text x=\"" << kLeft + 50 << "\" y=\"" << legend_y + 4
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(method)
          << (use_max ? " max" : " avg") << "</text>\n";
      legend_y += 18.0;
    }
  }
  if (!have_points) {
    svg << "  <text x=\"" << kWidth / 2 << "\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">no "
        << "successful rows</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace fasisac
