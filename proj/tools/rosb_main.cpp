#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rosb/baseline.hpp"
#include "rosb/checkpoint.hpp"
#include "rosb/eval.hpp"
#include "rosb/iohelp.hpp"
#include "rosb/train.hpp"

namespace fs = std::filesystem;
using namespace rosb;

namespace {

// Everything a run depends on, addressable by dotted key so that config
// files, --set overrides and manifests share one namespace.
struct FullConfig {
  EnvConfig env;
  TrainConfig train;
  BaselineConfig baseline;
  std::string eval_policy = "predefined";
  std::size_t eval_runs = 100;
  std::string sweep_radii;  // comma-separated meters
  int sweep_window = 30;
  std::size_t sweep_runs = 100;
  std::string compare_a;
  std::string compare_b;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const long x = to_long(key, v);
  if (x < 0) throw ConfigError("config key '" + key + "' must be >= 0");
  return static_cast<std::size_t>(x);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_int(key, item));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

void apply_key(FullConfig& fc, const std::string& key, const std::string& v) {
  auto& e = fc.env;
  auto& t = fc.train;
  if (key == "env.speed_mps") e.speed_mps = to_double(key, v);
  else if (key == "env.dt_s") e.dt_s = to_double(key, v);
  else if (key == "env.max_steps") e.max_steps = to_int(key, v);
  else if (key == "env.depth_m") e.depth_m = to_double(key, v);
  else if (key == "env.action_noise_sigma") e.action_noise_sigma = to_double(key, v);
  else if (key == "env.max_turn") e.max_turn = to_double(key, v);
  else if (key == "env.d_th_m") e.d_th_m = to_double(key, v);
  else if (key == "env.e_th_m") e.e_th_m = to_double(key, v);
  else if (key == "env.lambda") e.lambda = to_double(key, v);
  else if (key == "env.d_max_m") e.d_max_m = to_double(key, v);
  else if (key == "env.d_min_m") e.d_min_m = to_double(key, v);
  else if (key == "env.noise_sigma_m") e.noise_sigma_m = to_double(key, v);
  else if (key == "env.noise_epsilon_frac") e.noise_epsilon_frac = to_double(key, v);
  else if (key == "env.arena_half_width_m") e.arena_half_width_m = to_double(key, v);
  else if (key == "env.window") e.window = to_int(key, v);
  else if (key == "train.algo") t.algo = parse_algo(v);
  else if (key == "train.gamma") t.gamma = to_double(key, v);
  else if (key == "train.tau") t.tau = to_double(key, v);
  else if (key == "train.lr_actor") t.lr_actor = to_double(key, v);
  else if (key == "train.lr_critic") t.lr_critic = to_double(key, v);
  else if (key == "train.buffer_capacity") t.buffer_capacity = to_size(key, v);
  else if (key == "train.batch_start") t.batch_start = to_size(key, v);
  else if (key == "train.batch_max") t.batch_max = to_size(key, v);
  else if (key == "train.batch_double_every") t.batch_double_every = to_size(key, v);
  else if (key == "train.batch_additive") t.batch_additive = to_bool(key, v);
  else if (key == "train.warmup_episodes") t.warmup_episodes = to_size(key, v);
  else if (key == "train.update_every") t.update_every = to_size(key, v);
  else if (key == "train.update_times") t.update_times = to_size(key, v);
  else if (key == "train.parallel_envs") t.parallel_envs = to_size(key, v);
  else if (key == "train.hidden") t.hidden = parse_int_list(key, v);
  else if (key == "train.explore_noise_init") t.explore_noise_init = to_double(key, v);
  else if (key == "train.explore_noise_decay") t.explore_noise_decay = to_double(key, v);
  else if (key == "train.policy_delay") t.policy_delay = to_int(key, v);
  else if (key == "train.target_smoothing") t.target_smoothing = to_bool(key, v);
  else if (key == "train.smoothing_sigma") t.smoothing_sigma = to_double(key, v);
  else if (key == "train.smoothing_clip") t.smoothing_clip = to_double(key, v);
  else if (key == "train.alpha") t.alpha = to_double(key, v);
  else if (key == "train.auto_alpha") t.auto_alpha = to_bool(key, v);
  else if (key == "train.target_entropy") t.target_entropy = to_double(key, v);
  else if (key == "train.episodes") t.episodes = to_size(key, v);
  else if (key == "train.checkpoint_every") t.checkpoint_every = to_size(key, v);
  else if (key == "baseline.radius_m") fc.baseline.radius_m = to_double(key, v);
  else if (key == "baseline.capture_band_m") fc.baseline.capture_band_m = to_double(key, v);
  else if (key == "eval.policy") fc.eval_policy = v;
  else if (key == "eval.runs") fc.eval_runs = to_size(key, v);
  else if (key == "sweep.radii") fc.sweep_radii = v;
  else if (key == "sweep.window") fc.sweep_window = to_int(key, v);
  else if (key == "sweep.runs") fc.sweep_runs = to_size(key, v);
  else if (key == "compare.a") fc.compare_a = v;
  else if (key == "compare.b") fc.compare_b = v;
  else throw ConfigError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> echo_config(const FullConfig& fc) {
  const auto& e = fc.env;
  const auto& t = fc.train;
  std::map<std::string, std::string> m;
  m["env.speed_mps"] = fmt_double(e.speed_mps);
  m["env.dt_s"] = fmt_double(e.dt_s);
  m["env.max_steps"] = std::to_string(e.max_steps);
  m["env.depth_m"] = fmt_double(e.depth_m);
  m["env.action_noise_sigma"] = fmt_double(e.action_noise_sigma);
  m["env.max_turn"] = fmt_double(e.max_turn);
  m["env.d_th_m"] = fmt_double(e.d_th_m);
  m["env.e_th_m"] = fmt_double(e.e_th_m);
  m["env.lambda"] = fmt_double(e.lambda);
  m["env.d_max_m"] = fmt_double(e.d_max_m);
  m["env.d_min_m"] = fmt_double(e.d_min_m);
  m["env.noise_sigma_m"] = fmt_double(e.noise_sigma_m);
  m["env.noise_epsilon_frac"] = fmt_double(e.noise_epsilon_frac);
  m["env.arena_half_width_m"] = fmt_double(e.arena_half_width_m);
  m["env.window"] = std::to_string(e.window);
  m["train.algo"] = algo_name(t.algo);
  m["train.gamma"] = fmt_double(t.gamma);
  m["train.tau"] = fmt_double(t.tau);
  m["train.lr_actor"] = fmt_double(t.lr_actor);
  m["train.lr_critic"] = fmt_double(t.lr_critic);
  m["train.buffer_capacity"] = std::to_string(t.buffer_capacity);
  m["train.batch_start"] = std::to_string(t.batch_start);
  m["train.batch_max"] = std::to_string(t.batch_max);
  m["train.batch_double_every"] = std::to_string(t.batch_double_every);
  m["train.batch_additive"] = t.batch_additive ? "true" : "false";
  m["train.warmup_episodes"] = std::to_string(t.warmup_episodes);
  m["train.update_every"] = std::to_string(t.update_every);
  m["train.update_times"] = std::to_string(t.update_times);
  m["train.parallel_envs"] = std::to_string(t.parallel_envs);
  m["train.hidden"] = join_ints(t.hidden);
  m["train.explore_noise_init"] = fmt_double(t.explore_noise_init);
  m["train.explore_noise_decay"] = fmt_double(t.explore_noise_decay);
  m["train.policy_delay"] = std::to_string(t.policy_delay);
  m["train.target_smoothing"] = t.target_smoothing ? "true" : "false";
  m["train.smoothing_sigma"] = fmt_double(t.smoothing_sigma);
  m["train.smoothing_clip"] = fmt_double(t.smoothing_clip);
  m["train.alpha"] = fmt_double(t.alpha);
  m["train.auto_alpha"] = t.auto_alpha ? "true" : "false";
  m["train.target_entropy"] = fmt_double(t.target_entropy);
  m["train.episodes"] = std::to_string(t.episodes);
  m["train.checkpoint_every"] = std::to_string(t.checkpoint_every);
  m["baseline.radius_m"] = fmt_double(fc.baseline.radius_m);
  m["baseline.capture_band_m"] = fmt_double(fc.baseline.capture_band_m);
  m["eval.policy"] = fc.eval_policy;
  m["eval.runs"] = std::to_string(fc.eval_runs);
  m["sweep.radii"] = fc.sweep_radii;
  m["sweep.window"] = std::to_string(fc.sweep_window);
  m["sweep.runs"] = std::to_string(fc.sweep_runs);
  m["compare.a"] = fc.compare_a;
  m["compare.b"] = fc.compare_b;
  return m;
}

std::string now_iso() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

fs::path resolve_out(const std::string& out) {
  fs::path p = out;
  if (p.is_relative())
    if (const char* root = std::getenv("ROSB_OUT_ROOT")) p = fs::path(root) / p;
  return p;
}

void emit_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                   const FullConfig& fc, std::vector<std::string> outputs) {
  RunManifest m;
  m.command = command;
  m.version = kVersion;
  m.seed = seed;
  m.config = echo_config(fc);
  m.outputs = std::move(outputs);
  m.created_at = now_iso();
  write_manifest(dir / "manifest.json", m);
}

// Per-subcommand argument bundle; named flags become dotted-key overrides so
// the precedence chain is single: defaults < manifest < file < --set < flags.
struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string from_manifest;
  std::uint64_t seed = 1;
  std::string out;
  std::vector<std::string> flag_sets;  // appended last

  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd, const std::string& default_out) {
    out = default_out;
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--set", sets, "override a config key, e.g. --set env.depth_m=20")
        ->take_all();
    cmd->add_option("--from-manifest", from_manifest,
                    "load seed and full config from a previous run's manifest");
    seed_opt = cmd->add_option("--seed", seed, "root random seed");
    cmd->add_option("--out", out, "output directory");
  }

  FullConfig build(std::uint64_t& seed_out) const {
    FullConfig fc;
    std::uint64_t s = 1;
    if (!from_manifest.empty()) {
      const RunManifest m = read_manifest(from_manifest);
      for (const auto& [k, v] : m.config)
        if (!v.empty()) apply_key(fc, k, v);
      s = m.seed;
    }
    if (!config_path.empty())
      for (const auto& [k, v] : parse_config_file(config_path)) apply_key(fc, k, v);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_key(fc, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    for (const std::string& kv : flag_sets) {
      const auto eq = kv.find('=');
      apply_key(fc, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_opt->count() > 0) s = seed;
    seed_out = s;
    return fc;
  }
};

BaselineConfig resolved_baseline(const FullConfig& fc) {
  BaselineConfig bc = fc.baseline;
  bc.max_turn = fc.env.max_turn;
  bc.step_len_m = fc.env.speed_mps * fc.env.dt_s;
  if (bc.radius_m == 0.0) bc.radius_m = default_baseline_radius_m(fc.env.depth_m);
  return bc;
}

PolicyFactory make_policy_factory(const FullConfig& fc) {
  if (fc.eval_policy == "predefined") {
    const BaselineConfig bc = resolved_baseline(fc);
    return [bc]() -> std::unique_ptr<Policy> { return std::make_unique<BaselinePolicy>(bc); };
  }
  return actor_policy_factory(fc.eval_policy);
}

int run_train(const CommonArgs& args) {
  std::uint64_t seed = 1;
  const FullConfig fc = args.build(seed);
  const fs::path out = resolve_out(args.out);
  const TrainResult res = train(fc.env, fc.train, seed, out);
  emit_manifest(out, "train", seed, fc,
                {"learning_curve.csv", "rolling_return.csv", "rolling_error.csv",
                 "actor.ckpt", "train_state.ckpt"});
  std::cout << "trained " << res.records.size() << " episodes, " << res.updates
            << " gradient updates\n"
            << "actor checkpoint: " << res.actor_checkpoint.string() << "\n";
  return 0;
}

int run_eval(const CommonArgs& args) {
  std::uint64_t seed = 1;
  const FullConfig fc = args.build(seed);
  const fs::path out = resolve_out(args.out);
  fs::create_directories(out);

  const PolicyFactory factory = make_policy_factory(fc);
  const RunMatrix m = evaluate(factory, fc.env, fc.eval_runs, seed, fc.eval_policy);
  {
    std::ofstream os(out / "run_matrix.csv");
    if (!os) throw std::runtime_error("cannot write run_matrix.csv");
    write_run_matrix_csv(os, m);
  }
  std::vector<std::string> outputs = {"run_matrix.csv", "trajectory.csv"};
  {
    auto policy = factory();
    const auto rows =
        episode_trajectory(*policy, fc.env, derive_seed(seed, {kStreamEval, 0}));
    std::ofstream os(out / "trajectory.csv");
    if (!os) throw std::runtime_error("cannot write trajectory.csv");
    write_trajectory_csv(os, rows);
  }
  if (fc.eval_runs >= 4 && m.steps >= kSteadyLast) {
    const Metrics metrics = compute_metrics(m);
    write_metrics(out / "metrics.json", metrics);
    outputs.push_back("metrics.json");
    std::cout << "policy " << metrics.policy_id << ": transient IQM "
              << fmt_double(metrics.transient_iqm) << " m, steady IQM "
              << fmt_double(metrics.steady_iqm) << " m over " << metrics.n_runs
              << " runs\n";
  } else {
    std::cout << "wrote " << m.n_runs << " run(s); too few for summary metrics\n";
  }
  emit_manifest(out, "eval", seed, fc, outputs);
  return 0;
}

int run_compare(const CommonArgs& args) {
  std::uint64_t seed = 1;
  const FullConfig fc = args.build(seed);
  if (fc.compare_a.empty() || fc.compare_b.empty())
    throw ConfigError("compare needs --a and --b metrics files");
  const fs::path out = resolve_out(args.out);
  fs::create_directories(out);
  const Metrics a = read_metrics(fc.compare_a);
  const Metrics b = read_metrics(fc.compare_b);
  const CompareReport rep = compare(a, b);
  write_compare_json(out / "compare.json", rep, a, b);
  {
    std::ofstream os(out / "compare.csv");
    if (!os) throw std::runtime_error("cannot write compare.csv");
    write_compare_csv(os, a, b);
  }
  emit_manifest(out, "compare", seed, fc, {"compare.json", "compare.csv"});
  std::cout << a.policy_id << " vs " << b.policy_id << ": transient delta "
            << fmt_double(rep.delta_transient_pct) << "%, steady delta "
            << fmt_double(rep.delta_steady_pct) << "%, P(improvement) "
            << fmt_double(rep.prob_improvement) << "\n";
  return 0;
}

int run_sweep(const CommonArgs& args) {
  std::uint64_t seed = 1;
  const FullConfig fc = args.build(seed);
  const std::vector<double> radii = parse_double_list("sweep.radii", fc.sweep_radii);
  if (radii.empty()) throw ConfigError("sweep needs a non-empty --radii list");
  const fs::path out = resolve_out(args.out);
  fs::create_directories(out);
  const NoiseModel noise{fc.env.noise_sigma_m / 1000.0, fc.env.noise_epsilon_frac};
  const auto points = radius_sweep(fc.env.depth_m, radii, fc.sweep_window,
                                   fc.sweep_runs, seed, noise);
  {
    std::ofstream os(out / "sweep.csv");
    if (!os) throw std::runtime_error("cannot write sweep.csv");
    write_sweep_csv(os, points, fc.sweep_window);
  }
  emit_manifest(out, "sweep", seed, fc, {"sweep.csv"});
  for (const SweepPoint& p : points)
    std::cout << "radius " << fmt_double(p.radius_m) << " m: rmse "
              << fmt_double(p.rmse_m) << " m (" << p.n_used << " runs)\n";
  return 0;
}

const char* kFig4Radii =
    "100,120,140,160,180,200,220,240,260,280,283,300,320,340,360,380,400,420,440,"
    "460,480,500";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"range-only single-beacon target localization workbench"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, compare_args, sweep_args;

  CLI::App* cmd_train = app.add_subcommand("train", "train a policy");
  train_args.attach(cmd_train, "train_run");
  std::string algo_flag, test_flag;
  CLI::Option* algo_opt =
      cmd_train->add_option("--algo", algo_flag, "ddpg | td3 | sac-c | sac-a")
          ->check(CLI::IsMember({"ddpg", "td3", "sac-c", "sac-a"}));
  CLI::Option* test_opt =
      cmd_train
          ->add_option("--test", test_flag,
                       "reward setting: 1 (e_th=0), 2a (e_th=1 m), 2b (e_th=0.3 m)")
          ->check(CLI::IsMember({"1", "2a", "2b"}));
  std::uint64_t episodes_flag = 0;
  CLI::Option* episodes_opt =
      cmd_train->add_option("--episodes", episodes_flag, "episode budget");

  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a policy");
  eval_args.attach(cmd_eval, "eval_run");
  std::string policy_flag;
  CLI::Option* policy_opt = cmd_eval->add_option(
      "--policy", policy_flag, "actor checkpoint path, or 'predefined'");
  std::uint64_t runs_flag = 0;
  CLI::Option* runs_opt = cmd_eval->add_option("--runs", runs_flag, "episode count");
  double depth_flag = 0;
  CLI::Option* depth_opt =
      cmd_eval->add_option("--depth", depth_flag, "target depth in meters");
  double radius_flag = 0;
  CLI::Option* radius_opt = cmd_eval->add_option(
      "--radius", radius_flag, "predefined-path circle radius in meters");
  std::string eval_preset;
  CLI::Option* eval_preset_opt =
      cmd_eval->add_option("--preset", eval_preset, "paper-fig6")
          ->check(CLI::IsMember({"paper-fig6"}));

  CLI::App* cmd_compare = app.add_subcommand("compare", "compare two metrics files");
  compare_args.attach(cmd_compare, "compare_run");
  std::string a_flag, b_flag;
  CLI::Option* a_opt = cmd_compare->add_option("--a", a_flag, "first metrics.json");
  CLI::Option* b_opt = cmd_compare->add_option("--b", b_flag, "second metrics.json");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "survey-radius error study");
  sweep_args.attach(cmd_sweep, "sweep_run");
  double sweep_depth_flag = 0;
  CLI::Option* sweep_depth_opt =
      cmd_sweep->add_option("--depth", sweep_depth_flag, "target depth in meters");
  std::string radii_flag;
  CLI::Option* radii_opt =
      cmd_sweep->add_option("--radii", radii_flag, "comma-separated radii in meters");
  int window_flag = 0;
  CLI::Option* window_opt =
      cmd_sweep->add_option("--window", window_flag, "measurements per solve (30 or 300)");
  std::uint64_t sweep_runs_flag = 0;
  CLI::Option* sweep_runs_opt =
      cmd_sweep->add_option("--runs", sweep_runs_flag, "Monte-Carlo runs per radius");
  std::string sweep_preset;
  CLI::Option* sweep_preset_opt =
      cmd_sweep->add_option("--preset", sweep_preset, "paper-fig4")
          ->check(CLI::IsMember({"paper-fig4"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_train->parsed()) {
      if (algo_opt->count() > 0) {
        if (algo_flag == "sac-c") {
          train_args.flag_sets.push_back("train.algo=sac");
          train_args.flag_sets.push_back("train.auto_alpha=false");
        } else if (algo_flag == "sac-a") {
          train_args.flag_sets.push_back("train.algo=sac");
          train_args.flag_sets.push_back("train.auto_alpha=true");
        } else {
          train_args.flag_sets.push_back("train.algo=" + algo_flag);
        }
      }
      if (test_opt->count() > 0) {
        const std::string e_th = test_flag == "1" ? "0" : test_flag == "2a" ? "1" : "0.3";
        train_args.flag_sets.push_back("env.e_th_m=" + e_th);
      }
      if (episodes_opt->count() > 0)
        train_args.flag_sets.push_back("train.episodes=" + std::to_string(episodes_flag));
      return run_train(train_args);
    }
    if (cmd_eval->parsed()) {
      if (eval_preset_opt->count() > 0) {
        // paper-fig6: shallow target, sparse reward setting, 100 runs of 200.
        eval_args.flag_sets.push_back("env.depth_m=15");
        eval_args.flag_sets.push_back("env.e_th_m=0.3");
        eval_args.flag_sets.push_back("env.max_steps=200");
        eval_args.flag_sets.push_back("eval.runs=100");
      }
      if (policy_opt->count() > 0)
        eval_args.flag_sets.push_back("eval.policy=" + policy_flag);
      if (runs_opt->count() > 0)
        eval_args.flag_sets.push_back("eval.runs=" + std::to_string(runs_flag));
      if (depth_opt->count() > 0)
        eval_args.flag_sets.push_back("env.depth_m=" + fmt_double(depth_flag));
      if (radius_opt->count() > 0)
        eval_args.flag_sets.push_back("baseline.radius_m=" + fmt_double(radius_flag));
      return run_eval(eval_args);
    }
    if (cmd_compare->parsed()) {
      if (a_opt->count() > 0) compare_args.flag_sets.push_back("compare.a=" + a_flag);
      if (b_opt->count() > 0) compare_args.flag_sets.push_back("compare.b=" + b_flag);
      return run_compare(compare_args);
    }
    if (cmd_sweep->parsed()) {
      if (sweep_preset_opt->count() > 0) {
        sweep_args.flag_sets.push_back("env.depth_m=200");
        sweep_args.flag_sets.push_back(std::string("sweep.radii=") + kFig4Radii);
        sweep_args.flag_sets.push_back("sweep.runs=100");
      }
      if (sweep_depth_opt->count() > 0)
        sweep_args.flag_sets.push_back("env.depth_m=" + fmt_double(sweep_depth_flag));
      if (radii_opt->count() > 0) sweep_args.flag_sets.push_back("sweep.radii=" + radii_flag);
      if (window_opt->count() > 0)
        sweep_args.flag_sets.push_back("sweep.window=" + std::to_string(window_flag));
      if (sweep_runs_opt->count() > 0)
        sweep_args.flag_sets.push_back("sweep.runs=" + std::to_string(sweep_runs_flag));
      return run_sweep(sweep_args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CorruptCheckpoint& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
