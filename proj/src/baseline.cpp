#include "rosb/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace rosb {

void BaselineConfig::validate() const {
  if (radius_m < 0.0) throw ConfigError("baseline.radius_m must be >= 0");
  if (capture_band_m < 0.0) throw ConfigError("baseline.capture_band_m must be >= 0");
  if (!(max_turn > 0.0)) throw ConfigError("baseline.max_turn must be positive");
  if (!(step_len_m > 0.0)) throw ConfigError("baseline.step_len_m must be positive");
}

double default_baseline_radius_m(double depth_m) {
  return std::sqrt(2.0) * depth_m;
}

BaselinePolicy::BaselinePolicy(const BaselineConfig& cfg) {
  cfg.validate();
  if (cfg.radius_m == 0.0) throw ConfigError("baseline radius unresolved; supply radius_m");
  radius_ = cfg.radius_m / 1000.0;
  band_ = cfg.capture_band_m / 1000.0;
  max_turn_ = cfg.max_turn;
  chord_ = cfg.step_len_m / 1000.0;
}

double BaselinePolicy::action(const Observation& obs) {
  const Vec2 rel = obs.d_hat;  // p - q_hat
  const double dist = rel.norm();

  // Hysteresis: the exit threshold sits one band beyond the entry threshold,
  // so measurement jitter cannot flip the mode every step.
  if (circling_ && dist > radius_ + 2.0 * band_) circling_ = false;
  if (!circling_ && dist <= radius_ + band_) circling_ = true;

  double desired;
  if (!circling_) {
    desired = std::atan2(-rel.y, -rel.x);  // straight at the estimate
  } else {
    // Chase the point one chord ahead on the circle (counterclockwise), so
    // consecutive positions subtend a constant angle at the estimate.
    const double beta = 2.0 * std::asin(std::min(1.0, chord_ / (2.0 * radius_)));
    const double phi = std::atan2(rel.y, rel.x);
    const Vec2 wp{radius_ * std::cos(phi + beta) - rel.x,
                  radius_ * std::sin(phi + beta) - rel.y};
    desired = std::atan2(wp.y, wp.x);
  }

  const double psi = std::atan2(obs.v.y, obs.v.x);
  const double err = wrap_angle(desired - psi);
  return std::clamp(err / max_turn_, -1.0, 1.0);
}

}  // namespace rosb
