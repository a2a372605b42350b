#pragma once

#include <array>
#include <cmath>

#include "cospm/angles.hpp"

namespace cospm {

/// Geometric design of a 3-RRR spherical parallel manipulator.
///
/// alpha1[i] and alpha2[i] are the proximal and distal link angles of leg i,
/// eta[i] the pivot disposition angle, beta1 the inner platform angle (zero
/// for a coaxial mechanism) and beta2 the upper platform angle. All radians.
struct DesignParameters {
    std::array<double, 3> alpha1{pi / 4, pi / 4, pi / 2};
    std::array<double, 3> alpha2{pi / 2, pi / 2, pi / 2};
    std::array<double, 3> eta{pi / 4, -pi / 4, 0.0};
    double beta1 = 0.0;
    double beta2 = pi / 2;

    /// Reference coaxial instance used throughout the test suites.
    static DesignParameters table1() { return DesignParameters{}; }

    bool coaxial() const { return beta1 == 0.0; }

    void validate() const {
        auto finite = [](double v) { return std::isfinite(v); };
        for (int i = 0; i < 3; ++i) {
            if (!finite(alpha1[i]) || !finite(alpha2[i]) || !finite(eta[i]))
                throw ConfigError("design parameters must be finite");
            if (alpha1[i] <= 0.0 || alpha1[i] >= pi)
                throw ConfigError("alpha1 must lie in (0, pi)");
            if (alpha2[i] <= 0.0 || alpha2[i] >= pi)
                throw ConfigError("alpha2 must lie in (0, pi)");
        }
        if (!finite(beta1) || !finite(beta2))
            throw ConfigError("design parameters must be finite");
    }
};

/// Home configuration of the actuated joints.
inline Vec3 home_joints() { return Vec3::Constant(pi / 2); }

} // namespace cospm
