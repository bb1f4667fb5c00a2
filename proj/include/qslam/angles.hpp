#pragma once

#include <cmath>
#include <numbers>

namespace qslam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
    a = std::remainder(a, kTwoPi);
    if (a <= -kPi)
        a += kTwoPi;
    return a;
}

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

} // namespace qslam
