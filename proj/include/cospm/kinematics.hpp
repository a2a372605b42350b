#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cospm/angles.hpp"
#include "cospm/design.hpp"
#include "cospm/errors.hpp"
#include "cospm/rotation.hpp"

namespace cospm {

/// Axes of the three revolute joints of each leg, expressed in the base frame.
/// u_i is the actuated axis, w_i the elbow axis (depends on theta_i only) and
/// v_i the platform axis (depends on chi only).
struct UnitVectorSet {
    std::array<Vec3, 3> u, w, v;
};

namespace detail {

inline Mat3 base_frame(const DesignParameters& p, int i) {
    return rot_z(p.eta[i]) * rot_x(p.beta1 - pi);
}

inline Vec3 proximal_axis(const DesignParameters& p, int i) {
    return rot_x(p.alpha1[i]) * Vec3::UnitZ();
}

inline Vec3 platform_axis_local(const DesignParameters& p, int i) {
    return rot_z(p.eta[i]) * rot_x(-p.beta2) * Vec3::UnitZ();
}

inline Vec3 leg_w(const DesignParameters& p, int i, double theta_i) {
    return base_frame(p, i) * (rot_z(theta_i) * proximal_axis(p, i));
}

inline Vec3 leg_w_derivative(const DesignParameters& p, int i, double theta_i) {
    return base_frame(p, i) *
           (elementary_rotation_derivative(Axis::Z, theta_i) * proximal_axis(p, i));
}

} // namespace detail

inline UnitVectorSet unit_vectors(const DesignParameters& p, const Vec3& theta, const Vec3& chi) {
    UnitVectorSet s;
    const Mat3 r = rot_zyx(chi);
    for (int i = 0; i < 3; ++i) {
        s.u[i] = detail::base_frame(p, i) * Vec3::UnitZ();
        s.w[i] = detail::leg_w(p, i, theta[i]);
        s.v[i] = r * detail::platform_axis_local(p, i);
    }
    return s;
}

/// Kinematic closure f(theta, chi); the pose is on the constraint manifold
/// when all three components vanish. Component i is w_i . v_i - cos(alpha2_i).
inline Vec3 closure(const DesignParameters& p, const Vec3& theta, const Vec3& chi) {
    const Mat3 r = rot_zyx(chi);
    Vec3 f;
    for (int i = 0; i < 3; ++i) {
        const Vec3 v = r * detail::platform_axis_local(p, i);
        f[i] = detail::leg_w(p, i, theta[i]).dot(v) - std::cos(p.alpha2[i]);
    }
    return f;
}

namespace detail {

/// Partial derivatives of the closure without invertibility checks.
inline void closure_jacobians_raw(const DesignParameters& p, const Vec3& theta, const Vec3& chi,
                                  Mat3& j1, Mat3& j2) {
    const Mat3 rx = rot_x(chi[0]), ry = rot_y(chi[1]), rz = rot_z(chi[2]);
    const Mat3 drx = elementary_rotation_derivative(Axis::X, chi[0]);
    const Mat3 dry = elementary_rotation_derivative(Axis::Y, chi[1]);
    const Mat3 drz = elementary_rotation_derivative(Axis::Z, chi[2]);
    const Mat3 d1 = rz * ry * drx, d2 = rz * dry * rx, d3 = drz * ry * rx;
    const Mat3 r = rz * ry * rx;
    j2.setZero();
    for (int i = 0; i < 3; ++i) {
        const Vec3 m = platform_axis_local(p, i);
        const Vec3 w = leg_w(p, i, theta[i]);
        j1(i, 0) = w.dot(d1 * m);
        j1(i, 1) = w.dot(d2 * m);
        j1(i, 2) = w.dot(d3 * m);
        j2(i, i) = leg_w_derivative(p, i, theta[i]).dot(r * m);
    }
}

inline double condition_number(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m);
    const double smin = svd.singularValues()(2);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues()(0) / smin;
}

} // namespace detail

/// First-order kinematic maps evaluated at a pose.
///
/// J1 = df/dchi, J2 = df/dtheta, J = -J1^-1 J2 (angular rates from joint
/// rates) and T maps Tait-Bryan rates to the platform angular velocity.
struct KinematicMaps {
    Mat3 J1, J2, J, T;
    double cond1 = 0.0, cond2 = 0.0;
};

/// Rate mapping T(chi); singular iff chi2 = +-pi/2, det T = cos(chi2).
inline Mat3 euler_rate_map(const Vec3& chi) {
    const double s1 = std::sin(chi[0]), c1 = std::cos(chi[0]);
    const double s2 = std::sin(chi[1]), c2 = std::cos(chi[1]);
    Mat3 t;
    t << 1, 0, -s2,
         0, c1, s1 * c2,
         0, -s1, c1 * c2;
    return t;
}

/// Same map applied to the carrier angles nu; singular iff nu2 = +-pi/2.
inline Mat3 disturbance_rate_map(const Vec3& nu) { return euler_rate_map(nu); }

inline constexpr double kSingularDetTol = 1e-12;

inline KinematicMaps jacobians(const DesignParameters& p, const Vec3& theta, const Vec3& chi) {
    KinematicMaps m;
    detail::closure_jacobians_raw(p, theta, chi, m.J1, m.J2);
    if (std::abs(m.J1.determinant()) < kSingularDetTol)
        throw SingularJ1("jacobians: J1 is singular (type-2 proximity)");
    if (std::abs(m.J2.determinant()) < kSingularDetTol)
        throw SingularJ2("jacobians: J2 is singular (type-1 proximity)");
    m.J = -m.J1.partialPivLu().solve(m.J2);
    m.T = euler_rate_map(chi);
    m.cond1 = detail::condition_number(m.J1);
    m.cond2 = detail::condition_number(m.J2);
    return m;
}

/// Platform angular velocity in the LOS frame from Tait-Bryan rates.
inline Vec3 platform_velocity(const Vec3& chi, const Vec3& chi_dot) {
    return euler_rate_map(chi) * chi_dot;
}

/// Carrier angular velocity seen in the LOS frame, from the carrier angles nu
/// and their rates.
inline Vec3 carrier_disturbance(const Vec3& chi, const Vec3& nu, const Vec3& nu_dot) {
    return rot_zyx(chi) * (disturbance_rate_map(nu) * nu_dot);
}

/// Quadratic a t^2 + b t + c in the half-angle tangent of one joint.
struct LegQuadratic {
    double a = 0.0, b = 0.0, c = 0.0;
    double discriminant() const { return b * b - 4.0 * a * c; }
};

/// Per-leg closure polynomial in Theta_i = tan(theta_i/2) at a fixed
/// orientation. Exact for this mechanism family: each closure row is linear
/// in cos(theta_i) and sin(theta_i), so clearing the Weierstrass denominator
/// leaves a quadratic, recovered here from three samples.
inline LegQuadratic leg_quadratic(const DesignParameters& p, int i, const Vec3& chi) {
    const Vec3 v = rot_zyx(chi) * detail::platform_axis_local(p, i);
    const double k = std::cos(p.alpha2[i]);
    auto f = [&](double theta_i) {
        return detail::leg_w(p, i, theta_i).dot(v) - k;
    };
    const double f0 = f(0.0);               // Theta = 0, weight 1
    const double fp = 2.0 * f(pi / 2);       // Theta = +1, weight 1 + Theta^2
    const double fm = 2.0 * f(-pi / 2);      // Theta = -1
    LegQuadratic q;
    q.c = f0;
    q.a = 0.5 * (fp + fm) - f0;
    q.b = 0.5 * (fp - fm);
    return q;
}

/// Root-selection policy for the inverse geometric model: the root whose
/// joint angle is closest (mod 2 pi) to the reference wins.
struct BranchPolicy {
    Vec3 reference = home_joints();
};

inline constexpr double kDegenerateCoeffTol = 1e-12;

/// Solves one leg of the inverse geometric model.
inline double igm_solve_leg(const DesignParameters& p, int i, const Vec3& chi,
                            double reference_theta) {
    const LegQuadratic q = leg_quadratic(p, i, chi);
    double roots[2];
    int n_roots = 0;
    if (std::abs(q.a) < kDegenerateCoeffTol) {
        // the quadratic lost its leading term: theta_i = pi is a solution and
        // the finite root comes from the remaining linear equation
        if (std::abs(q.b) < kDegenerateCoeffTol)
            throw DegenerateQuadratic("igm: leg " + std::to_string(i + 1) +
                                      " quadratic degenerates to a constant");
        roots[n_roots++] = -q.c / q.b;
    } else {
        const double disc = q.discriminant();
        if (disc < 0.0)
            throw NoRealSolution("igm: leg " + std::to_string(i + 1) +
                                 " discriminant " + std::to_string(disc) +
                                 " < 0 (orientation outside the reachable workspace)");
        const double s = std::sqrt(disc);
        const double qq = -0.5 * (q.b + std::copysign(s, q.b == 0.0 ? 1.0 : q.b));
        roots[n_roots++] = qq / q.a;
        if (qq != 0.0) roots[n_roots++] = q.c / qq;
    }
    double best = 0.0, best_dist = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_roots; ++r) {
        const double theta = 2.0 * std::atan(roots[r]);
        const double dist = std::abs(angle_distance(theta, reference_theta));
        if (dist < best_dist) {
            best_dist = dist;
            best = theta;
        }
    }
    return best;
}

/// Inverse geometric model: joint vector realizing the orientation chi, on
/// the solution leaf anchored at the branch policy reference.
inline Vec3 igm(const DesignParameters& p, const Vec3& chi, const BranchPolicy& policy = {}) {
    (void)tan_half_forward(chi); // validity of the half-angle image
    Vec3 theta;
    for (int i = 0; i < 3; ++i) theta[i] = igm_solve_leg(p, i, chi, policy.reference[i]);
    return theta;
}

inline constexpr double kFgmTolerance = 1e-12;
inline constexpr int kFgmMaxIterations = 25;

/// Forward geometric model: Newton iteration on chi -> closure(theta, chi)
/// from the seed chi0. Full steps, convergence on the max norm of the
/// residual.
inline Vec3 fgm(const DesignParameters& p, const Vec3& theta, const Vec3& chi0,
                double tol = kFgmTolerance, int max_iterations = kFgmMaxIterations) {
    Vec3 chi = chi0;
    for (int it = 0; it <= max_iterations; ++it) {
        const Vec3 f = closure(p, theta, chi);
        if (f.cwiseAbs().maxCoeff() < tol) return chi;
        if (it == max_iterations) break;
        Mat3 j1, j2;
        detail::closure_jacobians_raw(p, theta, chi, j1, j2);
        if (std::abs(j1.determinant()) < kSingularDetTol)
            throw SingularJ1("fgm: J1 singular during Newton iteration");
        chi -= j1.partialPivLu().solve(f);
    }
    throw NoConvergence("fgm: no convergence within " + std::to_string(max_iterations) +
                        " iterations from the given seed");
}

} // namespace cospm
