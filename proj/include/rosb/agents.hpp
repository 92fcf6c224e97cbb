#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rosb/nn.hpp"
#include "rosb/replay.hpp"
#include "rosb/rng.hpp"

namespace rosb {

enum class Algo { ddpg, td3, sac };

Algo parse_algo(const std::string& name);  // "ddpg" | "td3" | "sac"
std::string algo_name(Algo a);

// Reparameterized tanh-Gaussian action with its log-density and the partial
// derivatives needed for pathwise gradients. xi is the unit-normal draw.
// logstd_raw is clamped to [-20, 2]; the clamp zeroes its gradient outside.
struct SquashedSample {
  double a = 0.0;
  double logp = 0.0;
  double dlogp_dmu = 0.0;
  double dlogp_dlogstd = 0.0;
  double da_dmu = 0.0;
  double da_dlogstd = 0.0;
};
SquashedSample squashed_gaussian(double mu, double logstd_raw, double xi);

// Learner hyperparameters. The defaults are the operating point the rest of
// the project assumes; everything is overridable through the config file.
struct TrainConfig {
  Algo algo = Algo::sac;
  double gamma = 0.99;
  double tau = 0.01;
  double lr_actor = 1e-3;
  double lr_critic = 1e-4;
  std::size_t buffer_capacity = 500000;
  std::size_t batch_start = 32;
  std::size_t batch_max = 2048;
  std::size_t batch_double_every = 200000;  // episodes
  bool batch_additive = false;              // +2 per boundary instead of x2
  std::size_t warmup_episodes = 10000;      // uniform-random actions
  std::size_t update_every = 30;            // aggregate env steps per update block
  std::size_t update_times = 20;            // gradient updates per block
  std::size_t parallel_envs = 8;
  std::vector<int> hidden = {64, 32};
  double explore_noise_init = 0.5;
  double explore_noise_decay = 0.9999;  // per episode
  int policy_delay = 2;                 // TD3
  bool target_smoothing = true;         // TD3
  double smoothing_sigma = 0.2;         // normalized action units
  double smoothing_clip = 0.5;
  double alpha = 0.005;          // SAC temperature (fixed mode)
  bool auto_alpha = false;       // SAC: learn log(alpha) by Adam
  double target_entropy = -1.0;  // SAC auto mode
  std::size_t episodes = 200000;
  std::size_t checkpoint_every = 0;  // episodes between snapshots; 0 = final only

  void validate() const;  // throws ConfigError

  // Schedules are indexed by completed-episode count.
  std::size_t batch_size_at(std::size_t episode) const;
  double noise_scale_at(std::size_t episode) const;
};

struct Losses {
  double critic = 0.0;  // mean squared TD error, averaged over critics
  double actor = 0.0;
  bool actor_updated = false;
  double alpha = 0.0;    // SAC temperature in effect
  double entropy = 0.0;  // SAC: mean(-log pi) of the fresh actions
  bool finite() const;
};

// Per-update instrumentation, filled when a sink is attached. Tests use this
// to check target construction without re-deriving it from weights.
struct UpdateTrace {
  std::vector<double> target_y;     // y_i per batch element
  std::vector<double> bootstrap;    // critic-side bootstrap value, before discount/mask
  std::vector<double> q1_target;    // target-critic values at (o', a')
  std::vector<double> q2_target;    // TD3/SAC only
  std::vector<double> logp_next;    // SAC only
  std::vector<bool> done;
  long critic_updates = 0;  // counters after this update
  long actor_updates = 0;
  bool actor_updated = false;
  double alpha = 0.0;       // temperature used for the targets
  double alpha_grad = 0.0;  // d(alpha loss)/d(log alpha), auto mode
  double alpha_after = 0.0;
  double mean_logp = 0.0;  // fresh-action batch mean, SAC
};

class Agent {
 public:
  explicit Agent(const TrainConfig& cfg) : cfg_(cfg) {}
  virtual ~Agent() = default;

  virtual Algo algo() const = 0;
  // Greedy action in [-1, 1].
  virtual double act(const std::array<double, 7>& obs) const = 0;
  // Exploration action; noise_scale is ignored by SAC (stochastic policy).
  virtual double act_explore(const std::array<double, 7>& obs, double noise_scale,
                             Rng& rng) const = 0;
  virtual Losses update(const std::vector<Transition>& batch, Rng& rng) = 0;

  // Full training state, restartable.
  virtual void save(const std::filesystem::path& path) const = 0;
  virtual void load(const std::filesystem::path& path) = 0;
  // Policy-only snapshot consumed by evaluation.
  virtual void save_actor(const std::filesystem::path& path) const = 0;

  long critic_updates() const { return critic_updates_; }
  long actor_updates() const { return actor_updates_; }
  const TrainConfig& config() const { return cfg_; }
  void set_trace(UpdateTrace* sink) { trace_ = sink; }

  // Single dispatch point for the training loop's action choice.
  double select_action(const std::array<double, 7>& obs, bool explore, bool warmup,
                       double noise_scale, Rng& rng) const;

 protected:
  TrainConfig cfg_;
  long critic_updates_ = 0;
  long actor_updates_ = 0;
  UpdateTrace* trace_ = nullptr;
};

std::unique_ptr<Agent> make_agent(const TrainConfig& cfg, std::uint64_t seed);

// Actor-only checkpoint field names shared with evaluation.
inline constexpr const char* kActorKindKey = "actor_kind";
inline constexpr const char* kActorKindDeterministic = "deterministic";
inline constexpr const char* kActorKindSquashed = "squashed_gaussian";

}  // namespace rosb
