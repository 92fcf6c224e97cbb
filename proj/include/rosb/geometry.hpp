#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace rosb {

inline constexpr double kPi = 3.14159265358979323846;

// Planar vector in scaled units (1.0 = 1 km).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::sqrt(squared_norm()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Map an angle to (-pi, pi]. The -pi boundary folds to +pi.
inline double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("wrap_angle: non-finite input");
  double r = std::remainder(theta, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

// Heading wrapped to (-pi, pi].
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : r_(wrap_angle(radians)) {}

  double radians() const { return r_; }
  Angle operator+(double delta) const { return Angle(r_ + delta); }
  Vec2 direction() const { return {std::cos(r_), std::sin(r_)}; }

 private:
  double r_ = 0.0;
};

// Slant-to-planar range projection given the target depth. Empty when the
// (noisy) slant is shorter than the depth, which has no planar solution.
inline std::optional<double> project_slant_range(double slant, double depth) {
  if (!(slant >= 0.0) || !(depth >= 0.0))
    throw std::invalid_argument("project_slant_range: negative input");
  if (slant < depth) return std::nullopt;
  const double d2 = slant * slant - depth * depth;
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

// Range measurement noise: w ~ N(epsilon_frac * slant, sigma^2), applied to
// the slant range before projection.
struct NoiseModel {
  double sigma = 0.001;        // std dev, scaled units (default 1 m)
  double epsilon_frac = 0.01;  // systematic error as a fraction of the slant

  void validate() const {
    if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
    if (!(epsilon_frac >= 0.0 && epsilon_frac < 1.0))
      throw std::invalid_argument("NoiseModel: epsilon_frac must be in [0, 1)");
  }
};

}  // namespace rosb
