#pragma once

#include <cmath>
#include <numbers>

namespace spinlock {

// All frequencies and rates inside the library are angular (rad/s), all
// times are seconds. These helpers exist so call sites can state their
// units instead of multiplying by bare constants.

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double from_hz(double f) { return kTwoPi * f; }
constexpr double from_khz(double f) { return kTwoPi * 1e3 * f; }
constexpr double from_mhz(double f) { return kTwoPi * 1e6 * f; }

constexpr double to_hz(double w) { return w / kTwoPi; }
constexpr double to_khz(double w) { return w / (kTwoPi * 1e3); }
constexpr double to_mhz(double w) { return w / (kTwoPi * 1e6); }

constexpr double from_us(double t) { return 1e-6 * t; }
constexpr double from_ns(double t) { return 1e-9 * t; }
constexpr double to_us(double t) { return 1e6 * t; }

// Maps any angle to the half-open interval (-pi, pi].
inline double wrap_angle(double a) {
  double y = std::fmod(a + std::numbers::pi, kTwoPi);
  if (y <= 0.0) y += kTwoPi;
  return y - std::numbers::pi;
}

}  // namespace spinlock
