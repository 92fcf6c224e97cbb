// Release gate: every check here must pass before results from this
// workbench are trusted. Each criterion prints one line; the exit code is
// the number of failures.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rosb/agents.hpp"
#include "rosb/baseline.hpp"
#include "rosb/checkpoint.hpp"
#include "rosb/env.hpp"
#include "rosb/estimator.hpp"
#include "rosb/eval.hpp"
#include "rosb/nn.hpp"
#include "rosb/replay.hpp"
#include "rosb/train.hpp"

using namespace rosb;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// --- criterion 1: exact recovery from three noiseless ranges ---------------

Outcome check_exact_recovery() {
  Rng rng(101);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int scene = 0; scene < 1000; ++scene) {
    const Vec2 q{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    Vec2 p[3];
    double cross = 0.0;
    do {
      for (Vec2& pi : p) pi = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      const Vec2 u = p[1] - p[0], v = p[2] - p[0];
      cross = u.x * v.y - u.y * v.x;
    } while (std::abs(cross) <= 0.02);
    SlidingLs ls(30);
    for (int k = 0; k < 3; ++k) ls.push({p[k], (p[k] - q).norm(), k});
    const Estimate e = ls.solve();
    if (!e.valid) return {false, "solver rejected a well-posed scene"};
    worst = std::max(worst, (e.q_hat - q).norm());
  }
  const double secs = secs_since(t0);
  return {worst < 1e-9 && secs < 1.0,
          "worst error " + num(worst) + " over 1000 scenes in " + num(secs) + " s"};
}

// --- criterion 2: slant-range projection -----------------------------------

Outcome check_projection() {
  Rng rng(102);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double planar = rng.uniform(0.0, 2.0);
    const double depth = rng.uniform(0.0, 1.0);
    const double slant = std::hypot(planar, depth);
    const auto back = project_slant_range(slant, depth);
    if (!back) return {false, "round trip lost a valid range"};
    worst = std::max(worst, std::abs(*back - planar));
  }
  const auto three = project_slant_range(5.0, 4.0);
  const bool exact = three && *three == 3.0;
  return {worst < 1e-12 && exact,
          "worst round-trip error " + num(worst) + ", 3-4-5 exact: " +
              (exact ? "yes" : "no")};
}

// --- criterion 3: reward branch values -------------------------------------

Outcome check_rewards() {
  const double tol = 1e-12;
  int bad = 0;
  const ScaledEnv env = scaled(EnvConfig{});
  bad += std::abs(reward_distance(0.2, env) - 1.0) > tol;
  bad += std::abs(reward_distance(0.5, env) - 0.0) > tol;
  bad += std::abs(reward_distance(0.7, env) - (-0.002)) > tol;

  EnvConfig ecfg;
  ecfg.e_th_m = 1.0;
  bad += std::abs(reward_error(0.0005, scaled(ecfg)) - 1.0) > tol;
  ecfg.e_th_m = 0.0;
  bad += std::abs(reward_error(0.0005, scaled(ecfg)) - 0.004995) > tol;
  bad += std::abs(reward_error(0.5, scaled(ecfg)) - 0.0) > tol;

  const auto lost = reward_terminal(1.2, env);
  bad += !(std::abs(lost.first - (-100.0)) <= tol && lost.second);
  const auto captured = reward_terminal(0.004, env);
  bad += !(std::abs(captured.first - (-1.0)) <= tol && captured.second);
  const auto ongoing = reward_terminal(0.4, env);
  bad += !(ongoing.first == 0.0 && !ongoing.second);
  return {bad == 0, std::to_string(9 - bad) + " of 9 branch cases match"};
}

// --- criterion 4: kinematics -----------------------------------------------

Outcome check_kinematics() {
  EnvConfig cfg;
  cfg.action_noise_sigma = 0.0;
  cfg.noise_sigma_m = 0.0;
  cfg.noise_epsilon_frac = 0.0;
  const ScaledEnv env = scaled(cfg);
  Rng rng(104);
  double worst_len = 0.0;
  for (int i = 0; i < 10000; ++i) {
    AgentState s;
    s.p = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    s.psi = Angle(rng.uniform(-kPi, kPi));
    s.v = env.speed * s.psi.direction();
    const double turn = rng.uniform(-env.max_turn, env.max_turn);
    const AgentState next = kinematics_step(s, turn, env, rng);
    worst_len = std::max(worst_len, std::abs((next.p - s.p).norm() - env.step_len));
  }

  cfg.max_turn = kPi / 6.0;  // a saturated turn closes a 12-gon
  const ScaledEnv turn_env = scaled(cfg);
  const double radius =
      turn_env.step_len / (2.0 * std::sin(turn_env.max_turn / 2.0));
  double worst_r = 0.0, closure = 0.0;
  for (const double sign : {1.0, -1.0}) {
    AgentState s;
    s.p = {0.0, 0.0};
    s.psi = Angle(0.0);
    s.v = turn_env.speed * s.psi.direction();
    std::vector<Vec2> verts{s.p};
    for (int k = 0; k < 12; ++k) {
      s = kinematics_step(s, sign * turn_env.max_turn, turn_env, rng);
      if (k < 11) verts.push_back(s.p);
    }
    closure = std::max(closure, (s.p - Vec2{0.0, 0.0}).norm());
    Vec2 c{0.0, 0.0};
    for (const Vec2& v : verts) c = c + v;
    c = (1.0 / 12.0) * c;
    for (const Vec2& v : verts)
      worst_r = std::max(worst_r, std::abs((v - c).norm() - radius));
  }
  return {worst_len < 1e-12 && worst_r < 1e-9 && closure < 1e-9,
          "chord error " + num(worst_len) + ", circle radius error " + num(worst_r) +
              " at R = " + num(radius * 1000.0, 6) + " m"};
}

// --- criterion 5: backprop vs central differences --------------------------

double gradient_check(Mlp& net, const Eigen::VectorXd& x) {
  Mlp::Cache cache;
  net.forward(x, cache);
  MlpGrads grads = MlpGrads::zeros_like(net);
  net.backward(cache, Eigen::VectorXd::Ones(1), grads);

  const double h = 1e-6;
  double worst = 0.0;
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-6);
  };
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    Eigen::MatrixXd& w = net.weights()[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        const double orig = w(i, j);
        w(i, j) = orig + h;
        const double hi = net.forward(x)(0);
        w(i, j) = orig - h;
        const double lo = net.forward(x)(0);
        w(i, j) = orig;
        worst = std::max(worst, rel((hi - lo) / (2.0 * h), grads.dw[l](i, j)));
      }
    Eigen::VectorXd& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double orig = b(i);
      b(i) = orig + h;
      const double hi = net.forward(x)(0);
      b(i) = orig - h;
      const double lo = net.forward(x)(0);
      b(i) = orig;
      worst = std::max(worst, rel((hi - lo) / (2.0 * h), grads.db[l](i)));
    }
  }
  return worst;
}

Outcome check_gradients() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    Mlp actor({7, 64, 32, 1}, OutputActivation::tanh);
    Mlp critic({8, 64, 32, 1}, OutputActivation::linear);
    actor.init(rng);
    critic.init(rng);
    Eigen::VectorXd xa(7), xc(8);
    for (int i = 0; i < 7; ++i) xa(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 8; ++i) xc(i) = rng.uniform(-1.0, 1.0);
    worst = std::max(worst, gradient_check(actor, xa));
    worst = std::max(worst, gradient_check(critic, xc));
  }
  return {worst < 1e-4, "worst relative error " + num(worst) + " over 10 seeds"};
}

// --- criterion 6: learner update structure ---------------------------------

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

Mlp const_net(const std::vector<int>& sizes, OutputActivation act,
              const Eigen::VectorXd& final_bias) {
  Mlp net(sizes, act);
  net.biases().back() = final_bias;
  return net;
}

fs::path craft_td3(double q1t_bias, double q2t_bias, const char* file) {
  const Mlp actor = const_net({7, 1, 1}, OutputActivation::tanh, vec1(0.0));
  const Mlp q_online = const_net({8, 1, 1}, OutputActivation::linear, vec1(0.0));
  const Mlp q1t = const_net({8, 1, 1}, OutputActivation::linear, vec1(q1t_bias));
  const Mlp q2t = const_net({8, 1, 1}, OutputActivation::linear, vec1(q2t_bias));
  CkptWriter w;
  w.add_string("algo", "td3");
  w.add_string(kActorKindKey, kActorKindDeterministic);
  actor.save(w, "actor");
  actor.save(w, "actor_target");
  q_online.save(w, "q1");
  q_online.save(w, "q2");
  q1t.save(w, "q1_target");
  q2t.save(w, "q2_target");
  AdamState::for_net(actor, 1e-3).save(w, "opt_actor");
  AdamState::for_net(q_online, 1e-4).save(w, "opt_q1");
  AdamState::for_net(q_online, 1e-4).save(w, "opt_q2");
  w.add_scalar("critic_updates", 0.0);
  w.add_scalar("actor_updates", 0.0);
  const fs::path p = fs::temp_directory_path() / file;
  w.write(p);
  return p;
}

fs::path craft_sac(double mu_bias, double logstd_bias, const char* file) {
  Mlp actor({7, 1, 2}, OutputActivation::linear);
  actor.biases().back() << mu_bias, logstd_bias;
  const Mlp q_online = const_net({8, 1, 1}, OutputActivation::linear, vec1(0.0));
  const Mlp qt = const_net({8, 1, 1}, OutputActivation::linear, vec1(1.0));
  CkptWriter w;
  w.add_string("algo", "sac");
  w.add_string(kActorKindKey, kActorKindSquashed);
  actor.save(w, "actor");
  q_online.save(w, "q1");
  q_online.save(w, "q2");
  qt.save(w, "q1_target");
  qt.save(w, "q2_target");
  AdamState::for_net(actor, 1e-3).save(w, "opt_actor");
  AdamState::for_net(q_online, 1e-4).save(w, "opt_q1");
  AdamState::for_net(q_online, 1e-4).save(w, "opt_q2");
  w.add_scalar("log_alpha", 0.0);
  w.add_scalar("alpha_m", 0.0);
  w.add_scalar("alpha_v", 0.0);
  w.add_scalar("alpha_steps", 0.0);
  w.add_scalar("critic_updates", 0.0);
  w.add_scalar("actor_updates", 0.0);
  const fs::path p = fs::temp_directory_path() / file;
  w.write(p);
  return p;
}

std::vector<Transition> synth_batch(int n, bool all_done, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Transition> b(n);
  for (int i = 0; i < n; ++i) {
    for (double& x : b[i].obs) x = rng.uniform(-1.0, 1.0);
    for (double& x : b[i].next_obs) x = rng.uniform(-1.0, 1.0);
    b[i].action = rng.uniform(-1.0, 1.0);
    b[i].reward = rng.uniform(-2.0, 2.0);
    b[i].done = all_done || rng.uniform() < 0.3;
  }
  return b;
}

Outcome check_update_structure() {
  std::vector<std::string> faults;

  TrainConfig td3_cfg;
  td3_cfg.algo = Algo::td3;
  td3_cfg.hidden = {1};
  td3_cfg.policy_delay = 2;
  td3_cfg.target_smoothing = false;
  td3_cfg.gamma = 0.9;
  {
    auto agent = make_agent(td3_cfg, 99);
    agent->load(craft_td3(3.0, 5.0, "rosb_acc_td3_min.ckpt"));
    UpdateTrace tr;
    agent->set_trace(&tr);
    Rng rng(7);
    const auto batch = synth_batch(16, false, 3);
    agent->update(batch, rng);
    for (int i = 0; i < 16; ++i) {
      if (std::abs(tr.bootstrap[i] - 3.0) > 1e-12) faults.push_back("min critic");
      const double expect =
          batch[i].reward + (batch[i].done ? 0.0 : 0.9 * tr.bootstrap[i]);
      if (std::abs(tr.target_y[i] - expect) > 1e-12) faults.push_back("target");
    }
    auto swapped = make_agent(td3_cfg, 99);
    swapped->load(craft_td3(5.0, 3.0, "rosb_acc_td3_swap.ckpt"));
    UpdateTrace tr2;
    swapped->set_trace(&tr2);
    Rng rng2(7);
    swapped->update(batch, rng2);
    for (int i = 0; i < 16; ++i)
      if (std::abs(tr2.bootstrap[i] - 3.0) > 1e-12) faults.push_back("min swap");
  }
  {
    auto agent = make_agent(td3_cfg, 99);
    agent->load(craft_td3(1.0, 2.0, "rosb_acc_td3_delay.ckpt"));
    UpdateTrace tr;
    agent->set_trace(&tr);
    Rng rng(11);
    const auto batch = synth_batch(8, false, 6);
    const bool expected[6] = {false, true, false, true, false, true};
    for (int k = 0; k < 6; ++k) {
      agent->update(batch, rng);
      if (tr.actor_updated != expected[k]) faults.push_back("actor delay");
      if (tr.actor_updates != (k + 1) / 2) faults.push_back("actor count");
    }
  }
  {
    TrainConfig cfg;
    cfg.algo = Algo::sac;
    cfg.hidden = {1};
    cfg.auto_alpha = true;
    cfg.target_entropy = -1.0;
    auto narrow = make_agent(cfg, 42);  // near-deterministic, log pi large
    narrow->load(craft_sac(0.0, -10.0, "rosb_acc_sac_narrow.ckpt"));
    UpdateTrace tr;
    narrow->set_trace(&tr);
    Rng rng(15);
    narrow->update(synth_batch(16, false, 21), rng);
    if (!(tr.mean_logp > 1.0 && tr.alpha_grad < 0.0 && tr.alpha_after > tr.alpha))
      faults.push_back("alpha up");
    auto wide = make_agent(cfg, 42);  // spread policy, log pi negative
    wide->load(craft_sac(0.0, 0.0, "rosb_acc_sac_wide.ckpt"));
    UpdateTrace tr2;
    wide->set_trace(&tr2);
    Rng rng2(16);
    wide->update(synth_batch(16, false, 22), rng2);
    if (!(tr2.mean_logp < 1.0 && tr2.alpha_grad > 0.0 && tr2.alpha_after < tr2.alpha))
      faults.push_back("alpha down");
  }
  for (Algo algo : {Algo::ddpg, Algo::td3, Algo::sac}) {
    TrainConfig cfg;
    cfg.algo = algo;
    cfg.hidden = {4};
    cfg.gamma = 0.97;
    auto agent = make_agent(cfg, 5);
    UpdateTrace tr;
    agent->set_trace(&tr);
    Rng rng(13);
    const auto batch = synth_batch(12, true, 9);
    agent->update(batch, rng);
    for (int i = 0; i < 12; ++i)
      if (tr.target_y[i] != batch[i].reward) faults.push_back("done mask");
  }
  if (faults.empty())
    return {true, "min-critic targets, 2:1 actor delay, temperature sign, done masking"};
  std::string d = "violated:";
  for (const std::string& f : faults) d += " " + f;
  return {false, d};
}

// --- criterion 7: replay and schedules -------------------------------------

Outcome check_schedules() {
  ReplayBuffer buf(500);
  for (int i = 0; i < 520; ++i) {
    Transition t;
    t.reward = i;
    buf.push(t);
  }
  const bool fifo = buf.size() == 500 && buf.at(0).reward == 20.0 &&
                    buf.at(499).reward == 519.0;

  TrainConfig cfg;
  cfg.explore_noise_init = 0.5;
  cfg.explore_noise_decay = 0.9999;
  const bool noise = std::abs(cfg.noise_scale_at(1) - 0.49995) < 1e-12 &&
                     std::abs(cfg.noise_scale_at(1000) - 0.4524164467792781) < 1e-12 &&
                     std::abs(cfg.noise_scale_at(10000) - 0.18393052321648523) < 1e-12;

  cfg.batch_start = 32;
  cfg.batch_max = 2048;
  cfg.batch_double_every = 20;
  const bool batch = cfg.batch_size_at(19) == 32 && cfg.batch_size_at(20) == 64 &&
                     cfg.batch_size_at(40) == 128 && cfg.batch_size_at(120) == 2048 &&
                     cfg.batch_size_at(1000000) == 2048;
  std::string d;
  d += fifo ? "fifo ok" : "fifo broken";
  d += noise ? ", decay ok" : ", decay broken";
  d += batch ? ", batch growth ok" : ", batch growth broken";
  return {fifo && noise && batch, d};
}

// --- criterion 8: survey radius vs window ----------------------------------

Outcome check_radius_sweep() {
  const auto t0 = Clock::now();
  const NoiseModel noise{0.001, 0.01};
  const std::vector<double> radii{280.0, 400.0};
  const auto w30 = radius_sweep(200.0, radii, 30, 100, 11, noise);
  const auto w300 = radius_sweep(200.0, radii, 300, 100, 11, noise);
  const double secs = secs_since(t0);
  const bool short_window_hurt = w30[1].rmse_m > w30[0].rmse_m;
  const bool long_window_flat = w300[1].rmse_m <= 1.1 * w300[0].rmse_m;
  return {short_window_hurt && long_window_flat && secs < 120.0,
          "w30 rmse " + num(w30[0].rmse_m) + " -> " + num(w30[1].rmse_m) + " m, w300 " +
              num(w300[0].rmse_m) + " -> " + num(w300[1].rmse_m) + " m in " +
              num(secs) + " s"};
}

// --- criterion 9: predefined controller accuracy ---------------------------

PolicyFactory baseline_factory(double depth_m) {
  BaselineConfig bc;
  bc.radius_m = default_baseline_radius_m(depth_m);
  return [bc]() -> std::unique_ptr<Policy> {
    return std::make_unique<BaselinePolicy>(bc);
  };
}

Outcome check_baseline_accuracy() {
  EnvConfig cfg;
  cfg.depth_m = 15.0;
  const RunMatrix m = evaluate(baseline_factory(15.0), cfg, 100, 1, "predefined");
  const Metrics metrics = compute_metrics(m);
  return {metrics.steady_iqm < 2.0,
          "steady-window IQM " + num(metrics.steady_iqm) + " m over 100 runs"};
}

// --- criterion 10: exact statistics ----------------------------------------

Outcome check_statistics() {
  const bool iqm_ok = iqm({1, 2, 3, 4, 5, 6, 7, 8}) == 4.5;
  const std::vector<double> a{1, 2, 3, 4};
  const bool poi_ok = probability_of_improvement(a, a) == 0.5;

  RunMatrix m;
  m.policy_id = "self";
  m.n_runs = 4;
  m.steps = 200;
  m.e_m.assign(4 * 200, 0.0);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t s = 0; s < 200; ++s) m.at(r, s) = 1.0 + r;
  const Metrics self = compute_metrics(m);
  const CompareReport rep = compare(self, self);
  const bool cmp_ok = rep.delta_transient_pct == 0.0 && rep.delta_steady_pct == 0.0 &&
                      rep.prob_improvement == 0.5;
  return {iqm_ok && poi_ok && cmp_ok,
          std::string("iqm ") + (iqm_ok ? "exact" : "off") + ", self-poi " +
              (poi_ok ? "exact" : "off") + ", self-compare " +
              (cmp_ok ? "all zero" : "nonzero")};
}

// --- criterion 11: learning makes progress ---------------------------------

Outcome check_learning() {
  const auto t0 = Clock::now();
  EnvConfig env;
  env.depth_m = 15.0;
  env.max_steps = 50;
  TrainConfig tc;
  tc.algo = Algo::sac;
  tc.auto_alpha = true;
  tc.parallel_envs = 4;
  tc.episodes = 3000;
  tc.warmup_episodes = 200;

  int improved = 0;
  std::string deltas;
  for (std::uint64_t seed : {1, 2, 3}) {
    const fs::path dir =
        fs::temp_directory_path() / ("rosb_acc_train_" + std::to_string(seed));
    fs::create_directories(dir);
    const TrainResult res = train(env, tc, seed, dir);
    std::vector<double> returns(res.records.size(), 0.0);
    for (const EpisodeRecord& r : res.records) returns[r.episode] = r.episode_return;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < 500; ++i) first += returns[i];
    for (std::size_t i = returns.size() - 500; i < returns.size(); ++i)
      last += returns[i];
    first /= 500.0;
    last /= 500.0;
    improved += last > first;
    deltas += (deltas.empty() ? "" : ", ") + num(first) + " -> " + num(last);
    fs::remove_all(dir);
  }

  EnvConfig ecfg;
  ecfg.depth_m = 15.0;
  const Metrics ma =
      compute_metrics(evaluate(baseline_factory(15.0), ecfg, 100, 21, "a"));
  const Metrics mb =
      compute_metrics(evaluate(baseline_factory(15.0), ecfg, 100, 22, "b"));
  const double poi = compare(ma, mb).prob_improvement;
  const bool poi_ok = poi >= 0.45 && poi <= 0.55;

  const double secs = secs_since(t0);
  return {improved >= 2 && poi_ok && secs < 900.0,
          std::to_string(improved) + "/3 seeds improved (returns " + deltas +
              "), equal-policy poi " + num(poi) + ", " + num(secs) + " s"};
}

// --- criterion 12: manifest replays ----------------------------------------

int run_cmd(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + ROSB_CLI_BIN + "\" " + args + " > " +
                          log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  if (st == -1 || !WIFEXITED(st)) return -1;
  return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

bool same_file(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && slurp(a) == slurp(b);
}

Outcome check_manifest_replay() {
  const fs::path root = fs::temp_directory_path() / "rosb_acc_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";

  const fs::path ta = root / "train_a", tb = root / "train_b";
  const std::string train_cmd =
      "train --algo td3 --episodes 30 --seed 6 --out " + ta.string() +
      " --set train.parallel_envs=2 --set train.warmup_episodes=10"
      " --set train.update_every=15 --set train.update_times=5"
      " --set env.max_steps=30";
  if (run_cmd(train_cmd, log) != 0) return {false, "train run failed"};
  if (run_cmd("train --from-manifest " + (ta / "manifest.json").string() + " --out " +
                  tb.string(),
              log) != 0)
    return {false, "train replay failed"};
  bool train_ok = true;
  for (const char* f : {"learning_curve.csv", "rolling_return.csv",
                        "rolling_error.csv", "actor.ckpt", "train_state.ckpt"})
    train_ok = train_ok && same_file(ta / f, tb / f);

  const fs::path ea = root / "eval_a", eb = root / "eval_b";
  if (run_cmd("eval --runs 6 --seed 7 --set env.depth_m=15 --out " + ea.string(),
              log) != 0)
    return {false, "eval run failed"};
  if (run_cmd("eval --from-manifest " + (ea / "manifest.json").string() + " --out " +
                  eb.string(),
              log) != 0)
    return {false, "eval replay failed"};
  bool eval_ok = true;
  for (const char* f : {"run_matrix.csv", "trajectory.csv", "metrics.json"})
    eval_ok = eval_ok && same_file(ea / f, eb / f);

  fs::remove_all(root);
  return {train_ok && eval_ok,
          std::string("train artifacts ") + (train_ok ? "identical" : "differ") +
              ", eval artifacts " + (eval_ok ? "identical" : "differ")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* what;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "noiseless least squares recovers 1000 random targets exactly",
       check_exact_recovery},
      {2, "slant-to-planar projection round-trips below 1e-12", check_projection},
      {3, "reward branches match the nine reference cases", check_rewards},
      {4, "step length is constant and saturated turns close the predicted circle",
       check_kinematics},
      {5, "backprop matches central differences on actor and critic shapes",
       check_gradients},
      {6, "learner update structure is the documented one", check_update_structure},
      {7, "replay eviction, exploration decay and batch growth schedules",
       check_schedules},
      {8, "survey radius sweep reproduces the window-dependent trade-off",
       check_radius_sweep},
      {9, "predefined controller reaches meter-level steady accuracy",
       check_baseline_accuracy},
      {10, "summary statistics are exact on reference inputs", check_statistics},
      {11, "short training runs improve returns and equal policies split wins",
       check_learning},
      {12, "manifest replays reproduce train and eval outputs bit for bit",
       check_manifest_replay},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.ok) ++failures;
    std::cout << (out.ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": "
              << c.what << " (" << out.detail << ")\n"
              << std::flush;
  }
  std::cout << (12 - failures) << " of 12 criteria passed\n";
  return failures;
}
