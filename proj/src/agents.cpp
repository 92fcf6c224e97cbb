#include "rosb/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rosb/checkpoint.hpp"
#include "rosb/env.hpp"
#include "rosb/parallel.hpp"

namespace rosb {
namespace {

constexpr int kObsDim = 7;
constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
// Fixed gradient-accumulation block; results are independent of thread count.
constexpr std::size_t kGradBlock = 16;

const double kLog2 = std::log(2.0);
const double kHalfLog2Pi = 0.5 * std::log(2.0 * 3.14159265358979323846);

Eigen::VectorXd to_eigen(const std::array<double, 7>& obs) {
  Eigen::VectorXd v(kObsDim);
  for (int i = 0; i < kObsDim; ++i) v(i) = obs[static_cast<std::size_t>(i)];
  return v;
}

Eigen::VectorXd critic_input(const std::array<double, 7>& obs, double action) {
  Eigen::VectorXd v(kObsDim + 1);
  for (int i = 0; i < kObsDim; ++i) v(i) = obs[static_cast<std::size_t>(i)];
  v(kObsDim) = action;
  return v;
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2) without cancellation for large |u|.
double log1m_tanh_sq(double u) { return 2.0 * (kLog2 - u - softplus(-2.0 * u)); }

std::vector<int> net_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes;
  sizes.reserve(hidden.size() + 2);
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

// Accumulators for blocked batch-gradient reduction. `add` merges only the
// fields that belong to the reduction; scratch sinks are dropped.
struct GradAcc {
  MlpGrads g;
  double loss = 0.0;
  void add(const GradAcc& o) {
    g.add(o.g);
    loss += o.loss;
  }
};

struct TwinGradAcc {
  MlpGrads g1, g2;
  double loss1 = 0.0, loss2 = 0.0;
  void add(const TwinGradAcc& o) {
    g1.add(o.g1);
    g2.add(o.g2);
    loss1 += o.loss1;
    loss2 += o.loss2;
  }
};

struct ActorGradAcc {
  MlpGrads g;
  MlpGrads scratch1, scratch2;  // critic backward sinks, never merged
  double loss = 0.0;
  double logp = 0.0;
  void add(const ActorGradAcc& o) {
    g.add(o.g);
    loss += o.loss;
    logp += o.logp;
  }
};

void check_batch(const std::vector<Transition>& batch) {
  if (batch.empty()) throw std::logic_error("agent update: empty batch");
}

void require_algo(const CkptReader& r, Algo a) {
  if (!r.has_string("algo") || r.str("algo") != algo_name(a))
    throw CorruptCheckpoint("checkpoint belongs to a different algorithm");
}

}  // namespace

SquashedSample squashed_gaussian(double mu, double logstd_raw, double xi) {
  SquashedSample s;
  const double logstd = std::clamp(logstd_raw, kLogStdMin, kLogStdMax);
  const double sigma = std::exp(logstd);
  const double u = mu + sigma * xi;
  s.a = std::tanh(u);
  const double one_m_a2 = 1.0 - s.a * s.a;
  s.logp = -0.5 * xi * xi - logstd - kHalfLog2Pi - log1m_tanh_sq(u);
  const double in_range = (logstd_raw > kLogStdMin && logstd_raw < kLogStdMax) ? 1.0 : 0.0;
  s.dlogp_dmu = 2.0 * s.a;
  s.dlogp_dlogstd = (-1.0 + 2.0 * s.a * sigma * xi) * in_range;
  s.da_dmu = one_m_a2;
  s.da_dlogstd = one_m_a2 * sigma * xi * in_range;
  return s;
}

Algo parse_algo(const std::string& name) {
  if (name == "ddpg") return Algo::ddpg;
  if (name == "td3") return Algo::td3;
  if (name == "sac") return Algo::sac;
  throw ConfigError("unknown algorithm '" + name + "' (expected ddpg, td3 or sac)");
}

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::ddpg: return "ddpg";
    case Algo::td3: return "td3";
    case Algo::sac: return "sac";
  }
  throw std::logic_error("algo_name: bad enum");
}

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("train.gamma must be in [0,1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("train.tau must be in (0,1]");
  if (lr_actor <= 0.0 || lr_critic <= 0.0) throw ConfigError("learning rates must be positive");
  if (buffer_capacity == 0) throw ConfigError("train.buffer_capacity must be positive");
  if (batch_start == 0 || batch_max < batch_start)
    throw ConfigError("batch sizes must satisfy 1 <= batch_start <= batch_max");
  if (batch_max > buffer_capacity)
    throw ConfigError("train.batch_max cannot exceed the buffer capacity");
  if (batch_double_every == 0) throw ConfigError("train.batch_double_every must be positive");
  if (update_every == 0) throw ConfigError("train.update_every must be positive");
  if (parallel_envs == 0) throw ConfigError("train.parallel_envs must be positive");
  if (hidden.empty()) throw ConfigError("train.hidden must name at least one layer");
  for (int h : hidden)
    if (h <= 0) throw ConfigError("train.hidden sizes must be positive");
  if (explore_noise_init < 0.0) throw ConfigError("train.explore_noise_init must be >= 0");
  if (!(explore_noise_decay > 0.0 && explore_noise_decay <= 1.0))
    throw ConfigError("train.explore_noise_decay must be in (0,1]");
  if (policy_delay <= 0) throw ConfigError("train.policy_delay must be positive");
  if (smoothing_sigma < 0.0 || smoothing_clip < 0.0)
    throw ConfigError("TD3 smoothing parameters must be >= 0");
  if (alpha < 0.0) throw ConfigError("train.alpha must be >= 0");
  if (episodes == 0) throw ConfigError("train.episodes must be positive");
}

std::size_t TrainConfig::batch_size_at(std::size_t episode) const {
  const std::size_t k = episode / batch_double_every;
  if (batch_additive) {
    const std::size_t b = batch_start + 2 * k;
    return b < batch_max ? b : batch_max;
  }
  std::size_t b = batch_start;
  for (std::size_t i = 0; i < k && b < batch_max; ++i) b *= 2;
  return b < batch_max ? b : batch_max;
}

double TrainConfig::noise_scale_at(std::size_t episode) const {
  return explore_noise_init * std::pow(explore_noise_decay, static_cast<double>(episode));
}

bool Losses::finite() const {
  return std::isfinite(critic) && std::isfinite(actor) && std::isfinite(alpha) &&
         std::isfinite(entropy);
}

double Agent::select_action(const std::array<double, 7>& obs, bool explore, bool warmup,
                            double noise_scale, Rng& rng) const {
  if (warmup) return rng.uniform(-1.0, 1.0);
  if (!explore) return act(obs);
  return act_explore(obs, noise_scale, rng);
}

// --- DDPG -----------------------------------------------------------------

namespace {

class DdpgAgent final : public Agent {
 public:
  DdpgAgent(const TrainConfig& cfg, std::uint64_t seed)
      : Agent(cfg),
        actor_(net_sizes(kObsDim, cfg.hidden, 1), OutputActivation::tanh),
        critic_(net_sizes(kObsDim + 1, cfg.hidden, 1), OutputActivation::linear) {
    Rng ra = Rng::child(seed, {kStreamInit, 0});
    Rng rc = Rng::child(seed, {kStreamInit, 1});
    actor_.init(ra);
    critic_.init(rc);
    actor_t_ = actor_;
    critic_t_ = critic_;
    opt_actor_ = AdamState::for_net(actor_, cfg.lr_actor);
    opt_critic_ = AdamState::for_net(critic_, cfg.lr_critic);
  }

  Algo algo() const override { return Algo::ddpg; }

  double act(const std::array<double, 7>& obs) const override {
    return actor_.forward(to_eigen(obs))(0);
  }

  double act_explore(const std::array<double, 7>& obs, double noise_scale,
                     Rng& rng) const override {
    return std::clamp(act(obs) + noise_scale * rng.normal(), -1.0, 1.0);
  }

  Losses update(const std::vector<Transition>& batch, Rng&) override {
    check_batch(batch);
    const std::size_t B = batch.size();
    const double invB = 1.0 / static_cast<double>(B);

    std::vector<double> y(B), boot(B);
    par::parallel_for(B, [&](std::size_t i) {
      const Transition& t = batch[i];
      const double ap = actor_t_.forward(to_eigen(t.next_obs))(0);
      boot[i] = critic_t_.forward(critic_input(t.next_obs, ap))(0);
      y[i] = t.reward + (t.done ? 0.0 : cfg_.gamma * boot[i]);
    });

    GradAcc czero{MlpGrads::zeros_like(critic_), 0.0};
    GradAcc cacc = czero;
    par::blocked_accumulate(
        B, kGradBlock, czero,
        [&](std::size_t i, GradAcc& a) {
          const Transition& t = batch[i];
          Mlp::Cache c;
          const double q = critic_.forward(critic_input(t.obs, t.action), c)(0);
          const double diff = q - y[i];
          a.loss += diff * diff * invB;
          Eigen::VectorXd up(1);
          up(0) = 2.0 * diff * invB;
          critic_.backward(c, up, a.g);
        },
        cacc);
    adam_step(critic_, cacc.g, opt_critic_);

    ActorGradAcc azero{MlpGrads::zeros_like(actor_), MlpGrads::zeros_like(critic_),
                       MlpGrads{}, 0.0, 0.0};
    ActorGradAcc aacc = azero;
    par::blocked_accumulate(
        B, kGradBlock, azero,
        [&](std::size_t i, ActorGradAcc& a) {
          const Transition& t = batch[i];
          Mlp::Cache ca, cq;
          const double api = actor_.forward(to_eigen(t.obs), ca)(0);
          const double q = critic_.forward(critic_input(t.obs, api), cq)(0);
          a.loss += -q * invB;
          Eigen::VectorXd up(1);
          up(0) = -invB;
          const Eigen::VectorXd ig = critic_.backward(cq, up, a.scratch1);
          Eigen::VectorXd ua(1);
          ua(0) = ig(kObsDim);
          actor_.backward(ca, ua, a.g);
        },
        aacc);
    adam_step(actor_, aacc.g, opt_actor_);

    soft_update(actor_t_, actor_, cfg_.tau);
    soft_update(critic_t_, critic_, cfg_.tau);
    ++critic_updates_;
    ++actor_updates_;

    Losses L;
    L.critic = cacc.loss;
    L.actor = aacc.loss;
    L.actor_updated = true;
    if (trace_) {
      trace_->target_y = y;
      trace_->bootstrap = boot;
      trace_->q1_target = boot;
      trace_->q2_target.clear();
      trace_->logp_next.clear();
      trace_->done.assign(B, false);
      for (std::size_t i = 0; i < B; ++i) trace_->done[i] = batch[i].done;
      trace_->critic_updates = critic_updates_;
      trace_->actor_updates = actor_updates_;
      trace_->actor_updated = true;
    }
    return L;
  }

  void save(const std::filesystem::path& path) const override {
    CkptWriter w;
    w.add_string("algo", algo_name(Algo::ddpg));
    w.add_string(kActorKindKey, kActorKindDeterministic);
    actor_.save(w, "actor");
    actor_t_.save(w, "actor_target");
    critic_.save(w, "critic");
    critic_t_.save(w, "critic_target");
    opt_actor_.save(w, "opt_actor");
    opt_critic_.save(w, "opt_critic");
    w.add_scalar("critic_updates", static_cast<double>(critic_updates_));
    w.add_scalar("actor_updates", static_cast<double>(actor_updates_));
    w.write(path);
  }

  void load(const std::filesystem::path& path) override {
    CkptReader r(path);
    require_algo(r, Algo::ddpg);
    actor_ = Mlp::load(r, "actor");
    actor_t_ = Mlp::load(r, "actor_target");
    critic_ = Mlp::load(r, "critic");
    critic_t_ = Mlp::load(r, "critic_target");
    opt_actor_ = AdamState::load(r, "opt_actor");
    opt_critic_ = AdamState::load(r, "opt_critic");
    critic_updates_ = static_cast<long>(r.scalar("critic_updates"));
    actor_updates_ = static_cast<long>(r.scalar("actor_updates"));
  }

  void save_actor(const std::filesystem::path& path) const override {
    CkptWriter w;
    w.add_string(kActorKindKey, kActorKindDeterministic);
    actor_.save(w, "actor");
    w.write(path);
  }

 private:
  Mlp actor_, actor_t_, critic_, critic_t_;
  AdamState opt_actor_, opt_critic_;
};

// --- TD3 ------------------------------------------------------------------

class Td3Agent final : public Agent {
 public:
  Td3Agent(const TrainConfig& cfg, std::uint64_t seed)
      : Agent(cfg),
        actor_(net_sizes(kObsDim, cfg.hidden, 1), OutputActivation::tanh),
        q1_(net_sizes(kObsDim + 1, cfg.hidden, 1), OutputActivation::linear),
        q2_(net_sizes(kObsDim + 1, cfg.hidden, 1), OutputActivation::linear) {
    Rng ra = Rng::child(seed, {kStreamInit, 0});
    Rng r1 = Rng::child(seed, {kStreamInit, 1});
    Rng r2 = Rng::child(seed, {kStreamInit, 2});
    actor_.init(ra);
    q1_.init(r1);
    q2_.init(r2);
    actor_t_ = actor_;
    q1_t_ = q1_;
    q2_t_ = q2_;
    opt_actor_ = AdamState::for_net(actor_, cfg.lr_actor);
    opt_q1_ = AdamState::for_net(q1_, cfg.lr_critic);
    opt_q2_ = AdamState::for_net(q2_, cfg.lr_critic);
  }

  Algo algo() const override { return Algo::td3; }

  double act(const std::array<double, 7>& obs) const override {
    return actor_.forward(to_eigen(obs))(0);
  }

  double act_explore(const std::array<double, 7>& obs, double noise_scale,
                     Rng& rng) const override {
    return std::clamp(act(obs) + noise_scale * rng.normal(), -1.0, 1.0);
  }

  Losses update(const std::vector<Transition>& batch, Rng& rng) override {
    check_batch(batch);
    const std::size_t B = batch.size();
    const double invB = 1.0 / static_cast<double>(B);

    // Noise drawn serially up front so the parallel target pass is pure.
    std::vector<double> eps(B, 0.0);
    if (cfg_.target_smoothing)
      for (double& e : eps)
        e = std::clamp(cfg_.smoothing_sigma * rng.normal(), -cfg_.smoothing_clip,
                       cfg_.smoothing_clip);

    std::vector<double> y(B), boot(B), vq1(B), vq2(B);
    par::parallel_for(B, [&](std::size_t i) {
      const Transition& t = batch[i];
      const double a0 = actor_t_.forward(to_eigen(t.next_obs))(0);
      const double ap = std::clamp(a0 + eps[i], -1.0, 1.0);
      const Eigen::VectorXd in = critic_input(t.next_obs, ap);
      vq1[i] = q1_t_.forward(in)(0);
      vq2[i] = q2_t_.forward(in)(0);
      boot[i] = std::min(vq1[i], vq2[i]);
      y[i] = t.reward + (t.done ? 0.0 : cfg_.gamma * boot[i]);
    });

    TwinGradAcc tzero{MlpGrads::zeros_like(q1_), MlpGrads::zeros_like(q2_), 0.0, 0.0};
    TwinGradAcc tacc = tzero;
    par::blocked_accumulate(
        B, kGradBlock, tzero,
        [&](std::size_t i, TwinGradAcc& a) {
          const Transition& t = batch[i];
          const Eigen::VectorXd in = critic_input(t.obs, t.action);
          Mlp::Cache c1, c2;
          const double p1 = q1_.forward(in, c1)(0);
          const double p2 = q2_.forward(in, c2)(0);
          const double d1 = p1 - y[i];
          const double d2 = p2 - y[i];
          a.loss1 += d1 * d1 * invB;
          a.loss2 += d2 * d2 * invB;
          Eigen::VectorXd u1(1), u2(1);
          u1(0) = 2.0 * d1 * invB;
          u2(0) = 2.0 * d2 * invB;
          q1_.backward(c1, u1, a.g1);
          q2_.backward(c2, u2, a.g2);
        },
        tacc);
    adam_step(q1_, tacc.g1, opt_q1_);
    adam_step(q2_, tacc.g2, opt_q2_);
    ++critic_updates_;

    Losses L;
    L.critic = 0.5 * (tacc.loss1 + tacc.loss2);

    const bool do_actor = critic_updates_ % cfg_.policy_delay == 0;
    if (do_actor) {
      ActorGradAcc azero{MlpGrads::zeros_like(actor_), MlpGrads::zeros_like(q1_),
                         MlpGrads{}, 0.0, 0.0};
      ActorGradAcc aacc = azero;
      par::blocked_accumulate(
          B, kGradBlock, azero,
          [&](std::size_t i, ActorGradAcc& a) {
            const Transition& t = batch[i];
            Mlp::Cache ca, cq;
            const double api = actor_.forward(to_eigen(t.obs), ca)(0);
            const double q = q1_.forward(critic_input(t.obs, api), cq)(0);
            a.loss += -q * invB;
            Eigen::VectorXd up(1);
            up(0) = -invB;
            const Eigen::VectorXd ig = q1_.backward(cq, up, a.scratch1);
            Eigen::VectorXd ua(1);
            ua(0) = ig(kObsDim);
            actor_.backward(ca, ua, a.g);
          },
          aacc);
      adam_step(actor_, aacc.g, opt_actor_);
      soft_update(actor_t_, actor_, cfg_.tau);
      soft_update(q1_t_, q1_, cfg_.tau);
      soft_update(q2_t_, q2_, cfg_.tau);
      ++actor_updates_;
      L.actor = aacc.loss;
      L.actor_updated = true;
    }

    if (trace_) {
      trace_->target_y = y;
      trace_->bootstrap = boot;
      trace_->q1_target = vq1;
      trace_->q2_target = vq2;
      trace_->logp_next.clear();
      trace_->done.assign(B, false);
      for (std::size_t i = 0; i < B; ++i) trace_->done[i] = batch[i].done;
      trace_->critic_updates = critic_updates_;
      trace_->actor_updates = actor_updates_;
      trace_->actor_updated = do_actor;
    }
    return L;
  }

  void save(const std::filesystem::path& path) const override {
    CkptWriter w;
    w.add_string("algo", algo_name(Algo::td3));
    w.add_string(kActorKindKey, kActorKindDeterministic);
    actor_.save(w, "actor");
    actor_t_.save(w, "actor_target");
    q1_.save(w, "q1");
    q2_.save(w, "q2");
    q1_t_.save(w, "q1_target");
    q2_t_.save(w, "q2_target");
    opt_actor_.save(w, "opt_actor");
    opt_q1_.save(w, "opt_q1");
    opt_q2_.save(w, "opt_q2");
    w.add_scalar("critic_updates", static_cast<double>(critic_updates_));
    w.add_scalar("actor_updates", static_cast<double>(actor_updates_));
    w.write(path);
  }

  void load(const std::filesystem::path& path) override {
    CkptReader r(path);
    require_algo(r, Algo::td3);
    actor_ = Mlp::load(r, "actor");
    actor_t_ = Mlp::load(r, "actor_target");
    q1_ = Mlp::load(r, "q1");
    q2_ = Mlp::load(r, "q2");
    q1_t_ = Mlp::load(r, "q1_target");
    q2_t_ = Mlp::load(r, "q2_target");
    opt_actor_ = AdamState::load(r, "opt_actor");
    opt_q1_ = AdamState::load(r, "opt_q1");
    opt_q2_ = AdamState::load(r, "opt_q2");
    critic_updates_ = static_cast<long>(r.scalar("critic_updates"));
    actor_updates_ = static_cast<long>(r.scalar("actor_updates"));
  }

  void save_actor(const std::filesystem::path& path) const override {
    CkptWriter w;
    w.add_string(kActorKindKey, kActorKindDeterministic);
    actor_.save(w, "actor");
    w.write(path);
  }

 private:
  Mlp actor_, actor_t_, q1_, q2_, q1_t_, q2_t_;
  AdamState opt_actor_, opt_q1_, opt_q2_;
};

// --- SAC ------------------------------------------------------------------

class SacAgent final : public Agent {
 public:
  SacAgent(const TrainConfig& cfg, std::uint64_t seed)
      : Agent(cfg),
        actor_(net_sizes(kObsDim, cfg.hidden, 2), OutputActivation::linear),
        q1_(net_sizes(kObsDim + 1, cfg.hidden, 1), OutputActivation::linear),
        q2_(net_sizes(kObsDim + 1, cfg.hidden, 1), OutputActivation::linear) {
    Rng ra = Rng::child(seed, {kStreamInit, 0});
    Rng r1 = Rng::child(seed, {kStreamInit, 1});
    Rng r2 = Rng::child(seed, {kStreamInit, 2});
    actor_.init(ra);
    q1_.init(r1);
    q2_.init(r2);
    q1_t_ = q1_;
    q2_t_ = q2_;
    opt_actor_ = AdamState::for_net(actor_, cfg.lr_actor);
    opt_q1_ = AdamState::for_net(q1_, cfg.lr_critic);
    opt_q2_ = AdamState::for_net(q2_, cfg.lr_critic);
    log_alpha_ = cfg.alpha > 0.0 ? std::log(cfg.alpha) : 0.0;
    opt_alpha_.lr = cfg.lr_critic;
  }

  Algo algo() const override { return Algo::sac; }

  double temperature() const { return cfg_.auto_alpha ? std::exp(log_alpha_) : cfg_.alpha; }

  double act(const std::array<double, 7>& obs) const override {
    return std::tanh(actor_.forward(to_eigen(obs))(0));
  }

  double act_explore(const std::array<double, 7>& obs, double /*noise_scale*/,
                     Rng& rng) const override {
    const Eigen::VectorXd out = actor_.forward(to_eigen(obs));
    return squashed_gaussian(out(0), out(1), rng.normal()).a;
  }

  Losses update(const std::vector<Transition>& batch, Rng& rng) override {
    check_batch(batch);
    const std::size_t B = batch.size();
    const double invB = 1.0 / static_cast<double>(B);
    const double alpha = temperature();

    std::vector<double> xi_next(B), xi_cur(B);
    for (double& x : xi_next) x = rng.normal();
    for (double& x : xi_cur) x = rng.normal();

    std::vector<double> y(B), boot(B), vq1(B), vq2(B), logp_next(B);
    par::parallel_for(B, [&](std::size_t i) {
      const Transition& t = batch[i];
      const Eigen::VectorXd head = actor_.forward(to_eigen(t.next_obs));
      const SquashedSample s = squashed_gaussian(head(0), head(1), xi_next[i]);
      const Eigen::VectorXd in = critic_input(t.next_obs, s.a);
      vq1[i] = q1_t_.forward(in)(0);
      vq2[i] = q2_t_.forward(in)(0);
      logp_next[i] = s.logp;
      boot[i] = std::min(vq1[i], vq2[i]) - alpha * s.logp;
      y[i] = t.reward + (t.done ? 0.0 : cfg_.gamma * boot[i]);
    });

    TwinGradAcc tzero{MlpGrads::zeros_like(q1_), MlpGrads::zeros_like(q2_), 0.0, 0.0};
    TwinGradAcc tacc = tzero;
    par::blocked_accumulate(
        B, kGradBlock, tzero,
        [&](std::size_t i, TwinGradAcc& a) {
          const Transition& t = batch[i];
          const Eigen::VectorXd in = critic_input(t.obs, t.action);
          Mlp::Cache c1, c2;
          const double p1 = q1_.forward(in, c1)(0);
          const double p2 = q2_.forward(in, c2)(0);
          const double d1 = p1 - y[i];
          const double d2 = p2 - y[i];
          a.loss1 += d1 * d1 * invB;
          a.loss2 += d2 * d2 * invB;
          Eigen::VectorXd u1(1), u2(1);
          u1(0) = 2.0 * d1 * invB;
          u2(0) = 2.0 * d2 * invB;
          q1_.backward(c1, u1, a.g1);
          q2_.backward(c2, u2, a.g2);
        },
        tacc);
    adam_step(q1_, tacc.g1, opt_q1_);
    adam_step(q2_, tacc.g2, opt_q2_);
    ++critic_updates_;

    // Actor: minimize mean(alpha * log pi - min(Q1, Q2)) with reparameterized
    // actions; gradients flow through both the action and log pi paths.
    ActorGradAcc azero{MlpGrads::zeros_like(actor_), MlpGrads::zeros_like(q1_),
                       MlpGrads::zeros_like(q2_), 0.0, 0.0};
    ActorGradAcc aacc = azero;
    par::blocked_accumulate(
        B, kGradBlock, azero,
        [&](std::size_t i, ActorGradAcc& a) {
          const Transition& t = batch[i];
          Mlp::Cache ca, c1, c2;
          const Eigen::VectorXd head = actor_.forward(to_eigen(t.obs), ca);
          const SquashedSample s = squashed_gaussian(head(0), head(1), xi_cur[i]);
          const double p1 = q1_.forward(critic_input(t.obs, s.a), c1)(0);
          const double p2 = q2_.forward(critic_input(t.obs, s.a), c2)(0);
          a.loss += (alpha * s.logp - std::min(p1, p2)) * invB;
          a.logp += s.logp;
          Eigen::VectorXd up(1);
          up(0) = -invB;
          const Eigen::VectorXd ig = p1 <= p2 ? q1_.backward(c1, up, a.scratch1)
                                              : q2_.backward(c2, up, a.scratch2);
          const double ga = ig(kObsDim);  // -(1/B) dQmin/da
          Eigen::VectorXd ua(2);
          ua(0) = alpha * invB * s.dlogp_dmu + ga * s.da_dmu;
          ua(1) = alpha * invB * s.dlogp_dlogstd + ga * s.da_dlogstd;
          actor_.backward(ca, ua, a.g);
        },
        aacc);
    adam_step(actor_, aacc.g, opt_actor_);
    ++actor_updates_;

    const double mean_logp = aacc.logp * invB;
    double alpha_grad = 0.0;
    if (cfg_.auto_alpha) {
      // d/dlog(alpha) of -log(alpha) * (mean log pi + target entropy).
      alpha_grad = -(mean_logp + cfg_.target_entropy);
      opt_alpha_.step(log_alpha_, alpha_grad);
    }

    soft_update(q1_t_, q1_, cfg_.tau);
    soft_update(q2_t_, q2_, cfg_.tau);

    Losses L;
    L.critic = 0.5 * (tacc.loss1 + tacc.loss2);
    L.actor = aacc.loss;
    L.actor_updated = true;
    L.alpha = temperature();
    L.entropy = -mean_logp;
    if (trace_) {
      trace_->target_y = y;
      trace_->bootstrap = boot;
      trace_->q1_target = vq1;
      trace_->q2_target = vq2;
      trace_->logp_next = logp_next;
      trace_->done.assign(B, false);
      for (std::size_t i = 0; i < B; ++i) trace_->done[i] = batch[i].done;
      trace_->critic_updates = critic_updates_;
      trace_->actor_updates = actor_updates_;
      trace_->actor_updated = true;
      trace_->alpha = alpha;
      trace_->alpha_grad = alpha_grad;
      trace_->alpha_after = temperature();
      trace_->mean_logp = mean_logp;
    }
    return L;
  }

  void save(const std::filesystem::path& path) const override {
    CkptWriter w;
    w.add_string("algo", algo_name(Algo::sac));
    w.add_string(kActorKindKey, kActorKindSquashed);
    actor_.save(w, "actor");
    q1_.save(w, "q1");
    q2_.save(w, "q2");
    q1_t_.save(w, "q1_target");
    q2_t_.save(w, "q2_target");
    opt_actor_.save(w, "opt_actor");
    opt_q1_.save(w, "opt_q1");
    opt_q2_.save(w, "opt_q2");
    w.add_scalar("log_alpha", log_alpha_);
    w.add_scalar("alpha_m", opt_alpha_.m);
    w.add_scalar("alpha_v", opt_alpha_.v);
    w.add_scalar("alpha_steps", static_cast<double>(opt_alpha_.step_count));
    w.add_scalar("critic_updates", static_cast<double>(critic_updates_));
    w.add_scalar("actor_updates", static_cast<double>(actor_updates_));
    w.write(path);
  }

  void load(const std::filesystem::path& path) override {
    CkptReader r(path);
    require_algo(r, Algo::sac);
    actor_ = Mlp::load(r, "actor");
    q1_ = Mlp::load(r, "q1");
    q2_ = Mlp::load(r, "q2");
    q1_t_ = Mlp::load(r, "q1_target");
    q2_t_ = Mlp::load(r, "q2_target");
    opt_actor_ = AdamState::load(r, "opt_actor");
    opt_q1_ = AdamState::load(r, "opt_q1");
    opt_q2_ = AdamState::load(r, "opt_q2");
    log_alpha_ = r.scalar("log_alpha");
    opt_alpha_.m = r.scalar("alpha_m");
    opt_alpha_.v = r.scalar("alpha_v");
    opt_alpha_.step_count = static_cast<long>(r.scalar("alpha_steps"));
    critic_updates_ = static_cast<long>(r.scalar("critic_updates"));
    actor_updates_ = static_cast<long>(r.scalar("actor_updates"));
  }

  void save_actor(const std::filesystem::path& path) const override {
    CkptWriter w;
    w.add_string(kActorKindKey, kActorKindSquashed);
    actor_.save(w, "actor");
    w.write(path);
  }

 private:
  Mlp actor_, q1_, q2_, q1_t_, q2_t_;
  AdamState opt_actor_, opt_q1_, opt_q2_;
  ScalarAdam opt_alpha_;
  double log_alpha_ = 0.0;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  switch (cfg.algo) {
    case Algo::ddpg: return std::make_unique<DdpgAgent>(cfg, seed);
    case Algo::td3: return std::make_unique<Td3Agent>(cfg, seed);
    case Algo::sac: return std::make_unique<SacAgent>(cfg, seed);
  }
  throw std::logic_error("make_agent: bad enum");
}

}  // namespace rosb
