#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "cospm/errors.hpp"

namespace cospm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

/// Maps an angle to the interval (-pi, pi].
inline double wrap_pi(double a) {
    double w = std::remainder(a, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

/// Signed angular distance from `a` to `b`, in (-pi, pi].
inline double angle_distance(double a, double b) { return wrap_pi(a - b); }

/// Half-angle tangent substitution, componentwise: x_i = tan(angle_i / 2).
/// Angles are wrapped to (-pi, pi] first; the map is undefined at +-pi.
inline Vec3 tan_half_forward(const Vec3& angles) {
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        const double w = wrap_pi(angles[i]);
        if (std::abs(w) >= pi - 1e-12)
            throw AngleAtBranchPoint("tan_half_forward: component " + std::to_string(i + 1) +
                                     " at the +-pi branch point");
        out[i] = std::tan(0.5 * w);
    }
    return out;
}

/// Inverse of tan_half_forward; returns angles in (-pi, pi).
inline Vec3 tan_half_inverse(const Vec3& t) {
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = 2.0 * std::atan(t[i]);
    return out;
}

} // namespace cospm
