#include "rosb/train.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "rosb/eval.hpp"
#include "rosb/iohelp.hpp"
#include "rosb/parallel.hpp"

namespace rosb {
namespace {

namespace fs = std::filesystem;

struct EnvSlot {
  Environment env;
  Rng env_rng{0};
  Rng explore_rng{0};
  Observation obs;
  double ret = 0.0;
  double last_e_q = 0.0;       // scaled
  std::uint64_t ordinal = 0;   // episodes started on this worker
  double noise_scale = 0.0;
  bool warmup = false;
  bool active = true;
  Transition tr;               // this sweep's transition
  bool finished = false;

  explicit EnvSlot(const EnvConfig& cfg) : env(cfg) {}
};

// Episode streams are keyed by (worker, per-worker ordinal), never by global
// counters, so reseeding does not depend on completion interleaving.
void start_episode(EnvSlot& s, std::uint64_t seed, std::uint64_t env_id,
                   std::size_t completed, const TrainConfig& tc) {
  s.env_rng = Rng::child(seed, {kStreamEnv, env_id, s.ordinal});
  s.explore_rng = Rng::child(seed, {kStreamExplore, env_id, s.ordinal});
  ++s.ordinal;
  s.obs = s.env.reset(s.env_rng);
  s.ret = 0.0;
  s.last_e_q = s.env.true_error();
  s.noise_scale = tc.noise_scale_at(completed);
  s.warmup = completed < tc.warmup_episodes;
}

void dump_batch(const fs::path& path, const std::vector<Transition>& batch,
                const Losses& L) {
  nlohmann::json j;
  j["critic_loss"] = L.critic;
  j["actor_loss"] = L.actor;
  j["alpha"] = L.alpha;
  j["entropy"] = L.entropy;
  auto arr = nlohmann::json::array();
  for (const Transition& t : batch)
    arr.push_back({{"obs", t.obs},
                   {"action", t.action},
                   {"reward", t.reward},
                   {"next_obs", t.next_obs},
                   {"done", t.done}});
  j["batch"] = arr;
  std::ofstream os(path);
  os << j.dump(2) << "\n";
}

void write_rolling_csv(const fs::path& path, const std::vector<double>& series,
                       std::size_t window) {
  const RollingSeries r = rolling(series, window);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "episode,mean,sd\n";
  for (std::size_t i = 0; i < r.mean.size(); ++i)
    os << i << ',' << fmt_double(r.mean[i]) << ',' << fmt_double(r.sd[i]) << '\n';
}

}  // namespace

TrainResult train(const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                  std::uint64_t seed, const fs::path& out_dir) {
  env_cfg.validate();
  train_cfg.validate();
  fs::create_directories(out_dir);

  auto agent = make_agent(train_cfg, seed);
  ReplayBuffer buffer(train_cfg.buffer_capacity);
  Rng learner = Rng::child(seed, {kStreamLearner});

  std::vector<EnvSlot> slots;
  slots.reserve(train_cfg.parallel_envs);
  for (std::size_t i = 0; i < train_cfg.parallel_envs; ++i) {
    slots.emplace_back(env_cfg);
    start_episode(slots.back(), seed, i, 0, train_cfg);
  }

  TrainResult result;
  result.curve_csv = out_dir / "learning_curve.csv";
  std::ofstream curve(result.curve_csv);
  if (!curve) throw std::runtime_error("cannot write " + result.curve_csv.string());
  curve << "episode,env_id,return,final_e_q_m,steps,noise_scale,batch_size\n";

  std::size_t completed = 0;
  std::uint64_t aggregate = 0;
  std::uint64_t last_update = 0;

  while (completed < train_cfg.episodes) {
    // Parallel phase: one step per active worker, no shared writes. The
    // learner's networks are read-only here, which stands in for the
    // "actor snapshot per update block" contract.
    par::parallel_for(slots.size(), [&](std::size_t i) {
      EnvSlot& s = slots[i];
      if (!s.active) return;
      const std::array<double, 7> flat = s.obs.flat();
      const double a = agent->select_action(flat, true, s.warmup, s.noise_scale,
                                            s.explore_rng);
      const StepResult res = s.env.step(a, s.env_rng);
      s.tr.obs = flat;
      s.tr.action = a;
      s.tr.reward = res.reward;
      s.tr.next_obs = res.obs.flat();
      s.tr.done = res.done;
      s.obs = res.obs;
      s.ret += res.reward;
      s.last_e_q = res.info.e_q;
      s.finished = res.done;
    });

    // Serial merge in worker order.
    for (std::size_t i = 0; i < slots.size(); ++i) {
      EnvSlot& s = slots[i];
      if (!s.active) continue;
      buffer.push(s.tr);
      ++aggregate;
      if (!s.finished) continue;
      if (completed >= train_cfg.episodes) {
        s.active = false;
        continue;
      }
      EpisodeRecord rec;
      rec.episode = completed;
      rec.env_id = static_cast<int>(i);
      rec.episode_return = s.ret;
      rec.final_e_q_m = s.last_e_q * 1000.0;
      rec.steps = s.env.steps_taken();
      rec.noise_scale = s.noise_scale;
      rec.batch_size = train_cfg.batch_size_at(completed);
      result.records.push_back(rec);
      curve << rec.episode << ',' << rec.env_id << ',' << fmt_double(rec.episode_return)
            << ',' << fmt_double(rec.final_e_q_m) << ',' << rec.steps << ','
            << fmt_double(rec.noise_scale) << ',' << rec.batch_size << '\n';
      ++completed;
      if (train_cfg.checkpoint_every != 0 &&
          completed % train_cfg.checkpoint_every == 0 &&
          completed < train_cfg.episodes) {
        const std::string tag = "_ep" + std::to_string(completed);
        agent->save_actor(out_dir / ("actor" + tag + ".ckpt"));
        agent->save(out_dir / ("train_state" + tag + ".ckpt"));
      }
      if (completed < train_cfg.episodes)
        start_episode(s, seed, i, completed, train_cfg);
      else
        s.active = false;
    }

    // Learning is gated on warmup completion; the step budget accrued during
    // warmup is not replayed afterwards.
    if (completed < train_cfg.warmup_episodes) {
      last_update = aggregate;
    } else {
      for (;;) {
        if (aggregate - last_update < train_cfg.update_every) break;
        const std::size_t batch_size = train_cfg.batch_size_at(completed);
        if (buffer.size() < batch_size) break;
        last_update += train_cfg.update_every;
        for (std::size_t t = 0; t < train_cfg.update_times; ++t) {
          const std::vector<Transition> batch = buffer.sample(batch_size, learner);
          const Losses L = agent->update(batch, learner);
          ++result.updates;
          if (!L.finite()) {
            const fs::path dump = out_dir / "diverged_batch.json";
            dump_batch(dump, batch, L);
            throw std::runtime_error("non-finite loss at update " +
                                     std::to_string(result.updates) +
                                     "; offending batch dumped to " + dump.string());
          }
        }
      }
    }
  }
  curve.close();

  result.actor_checkpoint = out_dir / "actor.ckpt";
  result.state_checkpoint = out_dir / "train_state.ckpt";
  agent->save_actor(result.actor_checkpoint);
  agent->save(result.state_checkpoint);

  std::vector<double> returns, errors;
  returns.reserve(result.records.size());
  errors.reserve(result.records.size());
  for (const EpisodeRecord& r : result.records) {
    returns.push_back(r.episode_return);
    errors.push_back(r.final_e_q_m);
  }
  write_rolling_csv(out_dir / "rolling_return.csv", returns, kRollingReturnWindow);
  write_rolling_csv(out_dir / "rolling_error.csv", errors, kRollingErrorWindow);
  return result;
}

}  // namespace rosb
