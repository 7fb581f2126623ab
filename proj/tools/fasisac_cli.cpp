// Command-line front end: sweeps, baselines, single-scenario runs, policy
// training/evaluation and config validation. Exit codes: 0 success, 1 config
// error, 2 every scenario failed, 3 partial failures.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fasisac/bcd.hpp"
#include "fasisac/channel.hpp"
#include "fasisac/ddpg.hpp"
#include "fasisac/environment.hpp"
#include "fasisac/errors.hpp"
#include "fasisac/experiment.hpp"

namespace fs = std::filesystem;
using namespace fasisac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAllFailed = 2;
constexpr int kExitPartial = 3;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool timings = false;
  std::string out_dir = ".";
  std::string csv_path, json_path, svg_path;
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; defaults apply when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "override master_seed");
  cmd->add_option("--workers", o.workers, "override num_workers");
  cmd->add_flag("--timings", o.timings,
                "record wall-clock times (wall_time_s is 0 otherwise, keeping output "
                "byte-reproducible)");
  cmd->add_option("--out-dir", o.out_dir, "directory for result files")
      ->capture_default_str();
  cmd->add_option("--csv", o.csv_path, "CSV output path (default <out-dir>/results.csv)");
  cmd->add_option("--json", o.json_path, "JSON output path (default <out-dir>/results.json)");
  cmd->add_option("--svg", o.svg_path, "SVG plot path (default <out-dir>/results.svg)");
}

ExperimentConfig load_config(const CommonOpts& o) {
  ExperimentConfig cfg =
      o.config_path.empty() ? ExperimentConfig{} : load_experiment_config(o.config_path);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.workers) cfg.num_workers = *o.workers;
  if (o.timings) cfg.record_timings = true;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

int emit_and_report(const ExperimentConfig& cfg, const SweepResult& result,
                    const CommonOpts& o) {
  if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
  const auto resolve = [&](const std::string& given, const char* name) {
    return given.empty() ? (fs::path(o.out_dir) / name).string() : given;
  };
  const std::string csv = resolve(o.csv_path, "results.csv");
  const std::string json = resolve(o.json_path, "results.json");
  const std::string svg = resolve(o.svg_path, "results.svg");
  write_file(csv, to_csv(result.rows));
  write_file(json, results_to_json(cfg, result, utc_timestamp()));
  write_file(svg, results_to_svg(cfg, result));

  std::printf("%-14s %8s %12s %12s %6s\n", "method", "snr_db", "avg_rate", "max_rate", "rows");
  for (const Aggregate& a : result.aggregates) {
    std::printf("%-14s %8g %12.6f %12.6f %6d\n", a.method.c_str(), a.snr_db, a.avg_rate,
                a.max_rate, a.count);
  }
  if (result.num_failed > 0) {
    std::printf("%d of %zu rows failed; first failures:\n", result.num_failed,
                result.rows.size());
    int shown = 0;
    for (const ResultRow& row : result.rows) {
      if (row.status == "ok" || shown >= 3) continue;
      std::printf("  scenario %d %s @ %g dB: %s\n", row.scenario_id, row.method.c_str(),
                  row.snr_db, row.status.c_str());
      ++shown;
    }
  }
  std::printf("config hash %s\nwrote %s %s %s\n", config_hash_hex(cfg).c_str(), csv.c_str(),
              json.c_str(), svg.c_str());

  if (!result.rows.empty() && result.num_failed == static_cast<int>(result.rows.size()))
    return kExitAllFailed;
  if (result.num_failed > 0) return kExitPartial;
  return kExitOk;
}

// Scenario + per-run rng streams for train/eval, derived exactly like a sweep
// row: scenario_seed = derive_seed(master_seed, id), run_seed =
// derive_seed(scenario_seed, snr_index).
struct SinglePoint {
  Scenario scenario;
  std::uint64_t run_seed = 0;
  double snr_db = 0.0;
};

SinglePoint make_point(const ExperimentConfig& cfg, int scenario_id, int snr_index) {
  if (snr_index < 0 || snr_index >= static_cast<int>(cfg.snr_db_list.size()))
    throw ConfigError("--snr-index out of range");
  SinglePoint p;
  const std::uint64_t scenario_seed = derive_seed(cfg.master_seed, scenario_id);
  Rng srng(scenario_seed);
  p.scenario = sample_scenario(srng, cfg.scenario_config());
  p.snr_db = cfg.snr_db_list[snr_index];
  p.scenario.noise_power = cfg.noise_power_for(p.snr_db);
  p.run_seed = derive_seed(scenario_seed, snr_index);
  return p;
}

int do_train(const CommonOpts& o, int scenario_id, int snr_index, int episodes,
             std::string ckpt_path) {
  const ExperimentConfig cfg = load_config(o);
  BcdConfig bcd = cfg.bcd;
  bcd.num_bs = cfg.num_bs;
  const SinglePoint point = make_point(cfg, scenario_id, snr_index);
  const Scenario& sc = point.scenario;
  if (episodes <= 0) episodes = bcd.ddpg_episodes * bcd.max_outer_iters;
  if (episodes <= 0) throw ConfigError("training needs a positive episode count");

  Rng rng(point.run_seed);
  Rng solver_rng = rng.split(0);
  Rng agent_rng = rng.split(1);
  Rng train_rng = rng.split(2);

  const AntennaLayout grid =
      fpa_layout(cfg.num_bs, sc.wavelength, sc.region_bs, sc.region_ut);
  const Eigen::RowVectorXcd channel = channel_vector(grid, sc);
  const auto targets = target_matrices(grid, sc);
  auto [relaxed, report] =
      solve_covariance(channel, targets, sc.p_max, sc.gamma, sc.noise_power, bcd.solver);
  if (report.status != SolveStatus::kOptimal) {
    std::fprintf(stderr, "initial solve failed: %s\n", to_string(report.status));
    return kExitAllFailed;
  }
  auto [recovered, rand_report] =
      gaussian_randomize(relaxed, channel, targets, sc.p_max, sc.gamma, sc.noise_power,
                         bcd.randomization_samples, solver_rng);
  if (!rand_report.recovered_rate.has_value()) {
    std::fprintf(stderr, "rank-one recovery failed at the starting layout\n");
    return kExitAllFailed;
  }

  EnvConfig env_cfg = bcd.env;
  env_cfg.episode_length = bcd.steps_per_episode;
  Environment env(sc, cfg.num_bs, env_cfg);
  env.set_covariance(recovered);

  DdpgConfig agent_cfg = bcd.agent;
  agent_cfg.state_dim = env.state_dim();
  agent_cfg.action_dim = env.action_dim();
  agent_cfg.action_bound = env.action_bound();
  DdpgAgent agent(agent_cfg, agent_rng);

  std::printf("scenario %d @ %g dB, start rate %.6f (relaxed %.6f)\n", scenario_id,
              point.snr_db, *rand_report.recovered_rate, report.relaxed_rate);
  const TrainResult trained =
      run_episodes(agent, env, episodes, bcd.steps_per_episode, train_rng);
  for (const EpisodeRow& row : trained.log) {
    std::printf("episode %3d  return %12.4f  final rate %.6f\n", row.episode,
                row.total_return, row.final_rate);
  }
  if (trained.best_found)
    std::printf("best shaped reward %.6f\n", trained.best_reward);

  if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
  if (ckpt_path.empty()) ckpt_path = (fs::path(o.out_dir) / "agent.ckpt").string();
  agent.save(ckpt_path);
  std::printf("saved %s\n", ckpt_path.c_str());
  return kExitOk;
}

int do_eval(const CommonOpts& o, int scenario_id, int snr_index, int episodes,
            const std::string& ckpt_path) {
  const ExperimentConfig cfg = load_config(o);
  BcdConfig bcd = cfg.bcd;
  bcd.num_bs = cfg.num_bs;
  const SinglePoint point = make_point(cfg, scenario_id, snr_index);
  const Scenario& sc = point.scenario;

  Rng rng(point.run_seed);
  Rng solver_rng = rng.split(0);
  Rng reset_rng = rng.split(2);

  // Reference: the fixed-grid solve this scenario would get in a sweep.
  OptResult base;
  {
    Rng base_rng(point.run_seed);
    base = fpa_baseline(sc, bcd, base_rng);
  }
  if (base.status != SolveStatus::kOptimal) {
    std::fprintf(stderr, "baseline solve failed: %s\n", to_string(base.status));
    return kExitAllFailed;
  }
  std::printf("baseline rate %.6f at %g dB\n", base.best_rate, point.snr_db);

  DdpgAgent agent = DdpgAgent::load(ckpt_path);
  EnvConfig env_cfg = bcd.env;
  env_cfg.episode_length = bcd.steps_per_episode;
  Environment env(sc, cfg.num_bs, env_cfg);
  env.set_covariance(base.best_covariance);
  if (agent.config().state_dim != env.state_dim() ||
      agent.config().action_dim != env.action_dim())
    throw ConfigError("checkpoint dimensions do not match this scenario");

  AntennaLayout best_layout = env.layout();
  double best_reward = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < episodes; ++e) {
    Eigen::VectorXd state = env.reset(reset_rng);
    for (int t = 0; t < bcd.steps_per_episode; ++t) {
      const StepResult step = env.step(agent.act(state));
      state = step.next_state;
      if (step.reward > best_reward) {
        best_reward = step.reward;
        best_layout = env.layout();
      }
      if (step.done) break;
    }
  }

  const Eigen::RowVectorXcd channel = channel_vector(best_layout, sc);
  const auto targets = target_matrices(best_layout, sc);
  auto [relaxed, report] =
      solve_covariance(channel, targets, sc.p_max, sc.gamma, sc.noise_power, bcd.solver);
  if (report.status != SolveStatus::kOptimal) {
    std::printf("policy layout infeasible (%s); baseline stands\n", to_string(report.status));
    return kExitOk;
  }
  auto [recovered, rand_report] =
      gaussian_randomize(relaxed, channel, targets, sc.p_max, sc.gamma, sc.noise_power,
                         bcd.randomization_samples, solver_rng);
  if (rand_report.recovered_rate.has_value()) {
    std::printf("policy rate %.6f (relaxed %.6f), improvement %+.6f\n",
                *rand_report.recovered_rate, report.relaxed_rate,
                *rand_report.recovered_rate - base.best_rate);
  } else {
    std::printf("rank-one recovery failed at the policy layout; baseline stands\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fasisac: joint transmit-covariance and antenna-position optimization with a "
      "fixed-grid baseline"};
  app.require_subcommand(1);

  CommonOpts sweep_opts, baseline_opts, run_opts, train_opts, eval_opts, validate_opts;
  int run_scenario = 0;
  int train_scenario = 0, train_snr_index = 0, train_episodes = 0;
  std::string train_out;
  int eval_scenario = 0, eval_snr_index = 0, eval_episodes = 3;
  std::string eval_ckpt;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "run every enabled method over all scenarios and SNR points");
  add_common_options(sweep, sweep_opts);

  CLI::App* baseline =
      app.add_subcommand("baseline", "fixed-position grid only, no positioning");
  add_common_options(baseline, baseline_opts);

  CLI::App* run = app.add_subcommand("run", "one scenario id across the SNR list");
  add_common_options(run, run_opts);
  run->add_option("--scenario", run_scenario, "scenario id (feeds the seed derivation)")
      ->capture_default_str();

  CLI::App* train = app.add_subcommand("train", "train the positioning policy, emit a checkpoint");
  add_common_options(train, train_opts);
  train->add_option("--scenario", train_scenario, "scenario id")->capture_default_str();
  train->add_option("--snr-index", train_snr_index, "index into snr_db_list")
      ->capture_default_str();
  train->add_option("--episodes", train_episodes,
                    "episode count (default: ddpg_episodes * max_outer_iters)");
  train->add_option("--out", train_out, "checkpoint path (default <out-dir>/agent.ckpt)");

  CLI::App* eval = app.add_subcommand("eval", "roll out a checkpointed policy, report rates");
  add_common_options(eval, eval_opts);
  eval->add_option("--scenario", eval_scenario, "scenario id")->capture_default_str();
  eval->add_option("--snr-index", eval_snr_index, "index into snr_db_list")
      ->capture_default_str();
  eval->add_option("--episodes", eval_episodes, "greedy rollouts")->capture_default_str();
  eval->add_option("--ckpt", eval_ckpt, "checkpoint produced by train")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* validate =
      app.add_subcommand("validate-config", "parse and validate a config, print its hash");
  add_common_options(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sweep->parsed()) {
      const ExperimentConfig cfg = load_config(sweep_opts);
      return emit_and_report(cfg, run_sweep(cfg), sweep_opts);
    }
    if (baseline->parsed()) {
      ExperimentConfig cfg = load_config(baseline_opts);
      cfg.run_fas = false;
      cfg.run_fpa = true;
      return emit_and_report(cfg, run_sweep(cfg), baseline_opts);
    }
    if (run->parsed()) {
      const ExperimentConfig cfg = load_config(run_opts);
      SweepResult result;
      result.rows = run_single_scenario(cfg, run_scenario);
      result.aggregates = compute_aggregates(cfg, result.rows);
      for (const ResultRow& row : result.rows)
        if (row.status != "ok") ++result.num_failed;
      return emit_and_report(cfg, result, run_opts);
    }
    if (train->parsed())
      return do_train(train_opts, train_scenario, train_snr_index, train_episodes, train_out);
    if (eval->parsed())
      return do_eval(eval_opts, eval_scenario, eval_snr_index, eval_episodes, eval_ckpt);
    if (validate->parsed()) {
      const ExperimentConfig cfg = load_config(validate_opts);
      std::printf("config ok, hash %s\n", config_hash_hex(cfg).c_str());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitAllFailed;
  }
  return kExitConfig;
}
