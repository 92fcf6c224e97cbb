#pragma once

#include <deque>
#include <stdexcept>

#include "rosb/geometry.hpp"

namespace rosb {

// One range ping: where the agent was and the projected planar range it saw.
struct Measurement {
  Vec2 p;
  double range_p = 0.0;
  long step = 0;
};

struct Estimate {
  Vec2 q_hat;
  bool valid = false;
  double condition = 0.0;     // condition number of the normal equations
  double residual_rms = 0.0;  // rms of (|p_i - q_hat| - range_i)
  double aux = 0.0;           // the relaxed |q|^2 unknown, for diagnostics
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sliding-window least squares on squared planar ranges. Each measurement
// contributes one row of the linear system
//   2 p_i . q - s = |p_i|^2 - d_i^2
// in the unknowns (q_x, q_y, s), where s stands in for |q|^2 but is left
// unconstrained. Collinear agent positions make the system rank deficient
// (mirror ambiguity) and are reported as an invalid estimate.
class SlidingLs {
 public:
  static constexpr double kMaxCondition = 1e5;

  explicit SlidingLs(int window);

  void push(const Measurement& m);
  Estimate solve() const;  // throws InsufficientData if fewer than 3 points

  std::size_t size() const { return buf_.size(); }
  int window() const { return window_; }
  void clear() { buf_.clear(); }
  const std::deque<Measurement>& buffer() const { return buf_; }

 private:
  int window_;
  std::deque<Measurement> buf_;
};

}  // namespace rosb
