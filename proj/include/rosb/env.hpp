#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "rosb/estimator.hpp"
#include "rosb/geometry.hpp"
#include "rosb/rng.hpp"

namespace rosb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EpisodeFinished : std::logic_error {
  using std::logic_error::logic_error;
};

// User-facing configuration in meters/seconds. All simulation math runs in
// scaled units (1.0 = 1 km); the conversion happens once in scaled().
struct EnvConfig {
  double speed_mps = 1.0;
  double dt_s = 30.0;
  int max_steps = 200;
  double depth_m = 15.0;
  double action_noise_sigma = 0.017;  // rad, actuation noise on the yaw increment
  double max_turn = kPi / 2.0;        // rad per step
  double d_th_m = 300.0;
  double e_th_m = 0.3;
  double lambda = 0.01;
  double d_max_m = 1000.0;
  double d_min_m = 5.0;
  double noise_sigma_m = 1.0;
  double noise_epsilon_frac = 0.01;
  double arena_half_width_m = 500.0;
  int window = 30;

  void validate() const;
};

// EnvConfig converted to scaled units.
struct ScaledEnv {
  double speed = 0.001;  // scaled distance per second
  double dt = 30.0;
  double step_len = 0.03;  // speed * dt
  int max_steps = 200;
  double depth = 0.015;
  double action_noise_sigma = 0.017;
  double max_turn = kPi / 2.0;
  double d_th = 0.3;
  double e_th = 0.0003;
  double lambda = 0.01;
  double d_max = 1.0;
  double d_min = 0.005;
  NoiseModel noise;
  double arena_half_width = 0.5;
  int window = 30;
};

ScaledEnv scaled(const EnvConfig& cfg);

struct AgentState {
  Vec2 p;
  Vec2 v;  // heading-aligned, |v| = configured speed (scaled)
  Angle psi;
};

struct TargetState {
  Vec2 q;
  double depth = 0.0;
};

// Layout per the observation contract: [p.x, p.y, v.x, v.y, d.x, d.y, range_p]
// where d = p - q_hat is the relative estimated target position.
struct Observation {
  Vec2 p;
  Vec2 v;
  Vec2 d_hat;
  double range_p = 0.0;

  std::array<double, 7> flat() const {
    return {p.x, p.y, v.x, v.y, d_hat.x, d_hat.y, range_p};
  }
};

struct StepInfo {
  double e_q = 0.0;  // true estimation error |q_hat - q|, scaled
  double r_d = 0.0;
  double r_e = 0.0;
  double r_terminal = 0.0;
  bool estimate_valid = false;
  bool action_clamped = false;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// --- pure building blocks -------------------------------------------------

// Discrete constant-speed model: the commanded turn plus actuation noise is
// applied to the heading first, and the new heading drives the displacement.
AgentState kinematics_step(const AgentState& state, double delta_psi,
                           const ScaledEnv& env, Rng& rng,
                           bool* clamped = nullptr);

// Noisy slant range, projected to the plane. Degenerate draws (slant below
// depth) are redrawn up to 8 times, then give up and report 0.
double measure_range(const Vec2& agent_p, const TargetState& target,
                     const NoiseModel& noise, Rng& rng);

// Reward pieces. d_hat is the agent distance to the *estimated* target;
// e_q is the true estimation error (privileged, training only).
double reward_distance(double d_hat, const ScaledEnv& env);
double reward_error(double e_q, const ScaledEnv& env);
std::pair<double, bool> reward_terminal(double d_hat, const ScaledEnv& env);

// --- episodic simulator ---------------------------------------------------

struct TrajectoryRow {
  int step = 0;
  double px = 0, py = 0, psi = 0;
  double qx = 0, qy = 0;
  double qhat_x = 0, qhat_y = 0;
  double range_p = 0;
  double r_d = 0, r_e = 0, r_terminal = 0;
  double e_q = 0;
};

class Environment {
 public:
  explicit Environment(const EnvConfig& cfg);

  Observation reset(Rng& rng);
  StepResult step(double action, Rng& rng);  // throws EpisodeFinished when done

  bool done() const { return done_; }
  int steps_taken() const { return steps_; }
  const ScaledEnv& params() const { return env_; }
  const AgentState& agent() const { return agent_; }
  const TargetState& target() const { return target_; }
  Vec2 q_hat() const { return q_hat_; }
  bool estimate_valid() const { return estimate_valid_; }
  double true_error() const { return (q_hat_ - target_.q).norm(); }
  const std::vector<TrajectoryRow>& trajectory() const { return traj_; }

 private:
  Observation observe() const;

  ScaledEnv env_;
  AgentState agent_;
  TargetState target_;
  SlidingLs estimator_;
  Vec2 q_hat_;  // last valid solution, or the arena-center prior
  bool estimate_valid_ = false;
  double last_range_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
  std::vector<TrajectoryRow> traj_;
};

// Distances in meters, headings in radians.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows);

}  // namespace rosb
