#pragma once

#include <cmath>
#include <numbers>

namespace squidsim {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Wraps an angle in degrees to [0, 360).
inline double wrap_360(double deg)
{
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

/// Signed shortest arc from `from` to `to`, in (-180, 180].
inline double shortest_arc(double to, double from)
{
  const double d = wrap_360(to - from);
  return d > 180.0 ? d - 360.0 : d;
}

}  // namespace squidsim
