#pragma once

#include "rosb/policy.hpp"

namespace rosb {

// Analytic survey controller: transit to the current target estimate, then
// hold a circle of fixed radius around it so measurements spread evenly.
struct BaselineConfig {
  double radius_m = 0.0;        // 0 = use default_baseline_radius_m(depth)
  // Hysteresis width around the circle. Must cover one step length, or an
  // inbound transit step can overshoot straight through the capture disk
  // before the controller ever switches to circling.
  double capture_band_m = 30.0;
  double max_turn = kPi / 2.0;  // rad per step, must match the environment
  double step_len_m = 30.0;     // v * dt, sets the chord angle on the circle

  void validate() const;  // throws ConfigError
};

// The circle is sized so planar ranges stay comparable to the depth leg,
// which keeps the projection well conditioned.
double default_baseline_radius_m(double depth_m);

class BaselinePolicy final : public Policy {
 public:
  explicit BaselinePolicy(const BaselineConfig& cfg);

  void reset() override { circling_ = false; }
  double action(const Observation& obs) override;

  bool circling() const { return circling_; }

 private:
  double radius_ = 0.0;  // scaled units from here on
  double band_ = 0.0;
  double max_turn_ = 0.0;
  double chord_ = 0.0;
  bool circling_ = false;
};

}  // namespace rosb
