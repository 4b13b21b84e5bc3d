#pragma once

#include <cmath>
#include <numbers>

namespace roomaware {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap to [-pi, pi). Exactly +pi maps to -pi.
inline double wrap_pi(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r - kPi;
}

// Wrap to [0, 2*pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

// Signed smallest difference a - b in [-pi, pi).
inline double angle_diff(double a, double b) { return wrap_pi(a - b); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace roomaware
