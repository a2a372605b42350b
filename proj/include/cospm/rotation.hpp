#pragma once

#include <cmath>

#include "cospm/angles.hpp"

namespace cospm {

enum class Axis { X, Y, Z };

/// Elementary rotation matrix about a local axis (right-handed, active).
inline Mat3 elementary_rotation(Axis axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    switch (axis) {
    case Axis::X:
        r << 1, 0, 0,
             0, c, -s,
             0, s, c;
        break;
    case Axis::Y:
        r << c, 0, s,
             0, 1, 0,
             -s, 0, c;
        break;
    case Axis::Z:
        r << c, -s, 0,
             s, c, 0,
             0, 0, 1;
        break;
    }
    return r;
}

/// Derivative of elementary_rotation with respect to the angle.
inline Mat3 elementary_rotation_derivative(Axis axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    switch (axis) {
    case Axis::X:
        r << 0, 0, 0,
             0, -s, -c,
             0, c, -s;
        break;
    case Axis::Y:
        r << -s, 0, c,
             0, 0, 0,
             -c, 0, -s;
        break;
    case Axis::Z:
        r << -s, -c, 0,
             c, -s, 0,
             0, 0, 0;
        break;
    }
    return r;
}

inline Mat3 rot_x(double a) { return elementary_rotation(Axis::X, a); }
inline Mat3 rot_y(double a) { return elementary_rotation(Axis::Y, a); }
inline Mat3 rot_z(double a) { return elementary_rotation(Axis::Z, a); }

/// Composition R_z(chi3) R_y(chi2) R_x(chi1) of the Tait-Bryan ZYX convention.
inline Mat3 rot_zyx(const Vec3& chi) {
    return rot_z(chi[2]) * rot_y(chi[1]) * rot_x(chi[0]);
}

} // namespace cospm
