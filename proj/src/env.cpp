#include "rosb/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rosb/iohelp.hpp"

namespace rosb {

void EnvConfig::validate() const {
  if (!(speed_mps > 0.0)) throw ConfigError("env.speed_mps must be > 0");
  if (!(dt_s > 0.0)) throw ConfigError("env.dt_s must be > 0");
  if (max_steps < 1) throw ConfigError("env.max_steps must be >= 1");
  if (!(max_turn > 0.0 && max_turn <= kPi)) throw ConfigError("env.max_turn_rad must be in (0, pi]");
  if (!(action_noise_sigma >= 0.0)) throw ConfigError("env.action_noise_sigma_rad must be >= 0");
  if (!(depth_m >= 0.0)) throw ConfigError("env.depth_m must be >= 0");
  if (!(d_min_m < d_th_m && d_th_m < d_max_m))
    throw ConfigError("require d_min_m < d_th_m < d_max_m");
  if (!(e_th_m >= 0.0)) throw ConfigError("env.e_th_m must be >= 0");
  if (!(lambda > 0.0)) throw ConfigError("env.lambda must be > 0");
  if (!(arena_half_width_m > 0.0)) throw ConfigError("env.arena_half_width_m must be > 0");
  if (window < 3) throw ConfigError("env.window must be >= 3");
  if (!(noise_sigma_m >= 0.0)) throw ConfigError("env.noise_sigma_m must be >= 0");
  if (!(noise_epsilon_frac >= 0.0 && noise_epsilon_frac < 1.0))
    throw ConfigError("env.noise_epsilon_frac must be in [0, 1)");
}

ScaledEnv scaled(const EnvConfig& cfg) {
  cfg.validate();
  ScaledEnv s;
  s.speed = cfg.speed_mps / 1000.0;
  s.dt = cfg.dt_s;
  s.step_len = s.speed * s.dt;
  s.max_steps = cfg.max_steps;
  s.depth = cfg.depth_m / 1000.0;
  s.action_noise_sigma = cfg.action_noise_sigma;
  s.max_turn = cfg.max_turn;
  s.d_th = cfg.d_th_m / 1000.0;
  s.e_th = cfg.e_th_m / 1000.0;
  s.lambda = cfg.lambda;
  s.d_max = cfg.d_max_m / 1000.0;
  s.d_min = cfg.d_min_m / 1000.0;
  s.noise.sigma = cfg.noise_sigma_m / 1000.0;
  s.noise.epsilon_frac = cfg.noise_epsilon_frac;
  s.arena_half_width = cfg.arena_half_width_m / 1000.0;
  s.window = cfg.window;
  return s;
}

AgentState kinematics_step(const AgentState& state, double delta_psi,
                           const ScaledEnv& env, Rng& rng, bool* clamped) {
  const double limited = std::clamp(delta_psi, -env.max_turn, env.max_turn);
  if (clamped) *clamped = limited != delta_psi;
  const double noise = env.action_noise_sigma > 0.0 ? rng.normal(0.0, env.action_noise_sigma) : 0.0;
  AgentState next;
  next.psi = state.psi + (limited + noise);
  const Vec2 dir = next.psi.direction();
  next.p = state.p + env.speed * env.dt * dir;
  next.v = env.speed * dir;
  return next;
}

double measure_range(const Vec2& agent_p, const TargetState& target,
                     const NoiseModel& noise, Rng& rng) {
  const Vec2 rel = agent_p - target.q;
  const double slant = std::sqrt(rel.squared_norm() + target.depth * target.depth);
  for (int attempt = 0; attempt < 9; ++attempt) {
    const double measured = slant + rng.normal(noise.epsilon_frac * slant, noise.sigma);
    if (auto planar = project_slant_range(std::max(measured, 0.0), target.depth))
      return *planar;
  }
  return 0.0;
}

double reward_distance(double d_hat, const ScaledEnv& env) {
  return d_hat > env.d_th ? env.lambda * (0.5 - d_hat) : 1.0;
}

double reward_error(double e_q, const ScaledEnv& env) {
  return e_q > env.e_th ? env.lambda * (0.5 - e_q) : 1.0;
}

std::pair<double, bool> reward_terminal(double d_hat, const ScaledEnv& env) {
  if (d_hat > env.d_max) return {-100.0, true};
  if (d_hat < env.d_min) return {-1.0, true};
  return {0.0, false};
}

Environment::Environment(const EnvConfig& cfg)
    : env_(scaled(cfg)), estimator_(env_.window) {}

Observation Environment::observe() const {
  return {agent_.p, agent_.v, agent_.p - q_hat_, last_range_};
}

Observation Environment::reset(Rng& rng) {
  const double half = env_.arena_half_width;
  target_.q = {rng.uniform(-half, half), rng.uniform(-half, half)};
  target_.depth = env_.depth;

  do {
    agent_.p = {rng.uniform(-half, half), rng.uniform(-half, half)};
  } while ((agent_.p - target_.q).norm() < env_.d_min);
  agent_.psi = Angle(rng.uniform(-kPi, kPi));
  agent_.v = env_.speed * agent_.psi.direction();

  estimator_.clear();
  q_hat_ = {0.0, 0.0};  // uninformative prior: arena center
  estimate_valid_ = false;
  steps_ = 0;
  done_ = false;

  last_range_ = measure_range(agent_.p, target_, env_.noise, rng);
  estimator_.push({agent_.p, last_range_, 0});

  traj_.clear();
  traj_.push_back({0, agent_.p.x, agent_.p.y, agent_.psi.radians(), target_.q.x,
                   target_.q.y, q_hat_.x, q_hat_.y, last_range_, 0.0, 0.0, 0.0,
                   true_error()});
  return observe();
}

StepResult Environment::step(double action, Rng& rng) {
  if (done_) throw EpisodeFinished("Environment::step called on a finished episode");

  bool clamped_action = false;
  const double a = std::clamp(action, -1.0, 1.0);
  clamped_action = a != action;

  bool clamped_turn = false;
  agent_ = kinematics_step(agent_, a * env_.max_turn, env_, rng, &clamped_turn);

  last_range_ = measure_range(agent_.p, target_, env_.noise, rng);
  ++steps_;
  estimator_.push({agent_.p, last_range_, steps_});
  if (estimator_.size() >= 3) {
    const Estimate est = estimator_.solve();
    estimate_valid_ = est.valid;
    if (est.valid) q_hat_ = est.q_hat;  // otherwise keep the previous solution
  }

  const double d_hat = (agent_.p - q_hat_).norm();
  const double e_q = true_error();

  StepResult res;
  res.info.r_d = reward_distance(d_hat, env_);
  res.info.r_e = reward_error(e_q, env_);
  const auto [r_term, terminal] = reward_terminal(d_hat, env_);
  res.info.r_terminal = r_term;
  res.info.e_q = e_q;
  res.info.estimate_valid = estimate_valid_;
  res.info.action_clamped = clamped_action || clamped_turn;
  res.reward = res.info.r_d + res.info.r_e + res.info.r_terminal;
  done_ = terminal || steps_ >= env_.max_steps;
  res.done = done_;
  res.obs = observe();

  traj_.push_back({steps_, agent_.p.x, agent_.p.y, agent_.psi.radians(),
                   target_.q.x, target_.q.y, q_hat_.x, q_hat_.y, last_range_,
                   res.info.r_d, res.info.r_e, res.info.r_terminal, e_q});
  return res;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
  os << "step,px,py,psi,qx,qy,qhat_x,qhat_y,range_p,r_d,r_e,r_terminal,e_q\n";
  for (const TrajectoryRow& r : rows) {
    os << r.step << ',' << fmt_double(r.px * 1000.0) << ',' << fmt_double(r.py * 1000.0)
       << ',' << fmt_double(r.psi) << ',' << fmt_double(r.qx * 1000.0) << ','
       << fmt_double(r.qy * 1000.0) << ',' << fmt_double(r.qhat_x * 1000.0) << ','
       << fmt_double(r.qhat_y * 1000.0) << ',' << fmt_double(r.range_p * 1000.0) << ','
       << fmt_double(r.r_d) << ',' << fmt_double(r.r_e) << ',' << fmt_double(r.r_terminal)
       << ',' << fmt_double(r.e_q * 1000.0) << '\n';
  }
}

}  // namespace rosb
