#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "cospm/design.hpp"
#include "cospm/discretize.hpp"
#include "cospm/errors.hpp"
#include "cospm/kinematics.hpp"
#include "cospm/transfer.hpp"

namespace cospm {

/// Closed-loop actuator model: first order lag of time constant tau_m with an
/// input disturbance, either a constant step or smoothed Coulomb friction
/// acting against the joint rate.
struct ActuatorParameters {
    enum class Mode { unit_step, coulomb };

    double tau_m = 1.6e-3;
    Mode mode = Mode::unit_step;
    /// Step magnitude per axis (unit_step) or friction coefficient (coulomb),
    /// in commanded-rate units.
    Vec3 disturbance = Vec3::Ones();

    void validate() const {
        if (!(tau_m > 0.0)) throw ConfigError("actuator: tau_m must be positive");
    }
};

namespace detail {

/// Partial fractions of K0 over its double integrator and two quadratic pole
/// pairs: K0 = r1/s + r2/s^2 + (e1 s + f1)/q1 + (e2 s + f2)/q2.
struct K0Residues {
    double r1, r2, e1, f1, e2, f2;
};

inline K0Residues k0_partial_fractions(const ControllerCoefficients& c) {
    using poly::Coeffs;
    using poly::mul;
    const auto tf = k0_continuous(c);
    const Coeffs q1{1.0, c.c1, c.d1}, q2{1.0, c.c2, c.d2};
    const Coeffs q1q2 = mul(q1, q2);
    const std::array<Coeffs, 6> basis = {
        mul({1.0, 0.0}, q1q2),            // r1 * s q1 q2
        q1q2,                             // r2 * q1 q2
        mul({1.0, 0.0, 0.0, 0.0}, q2),    // e1 * s^3 q2
        mul({1.0, 0.0, 0.0}, q2),         // f1 * s^2 q2
        mul({1.0, 0.0, 0.0, 0.0}, q1),    // e2 * s^3 q1
        mul({1.0, 0.0, 0.0}, q1),         // f2 * s^2 q1
    };
    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
    for (int col = 0; col < 6; ++col) {
        const Coeffs& b = basis[col];
        for (size_t k = 0; k < b.size(); ++k)
            M(static_cast<int>(6 - b.size() + k), col) = b[k];
    }
    for (size_t k = 0; k < tf.num.size(); ++k)
        rhs(static_cast<int>(6 - tf.num.size() + k)) = tf.num[k];
    // equilibrate rows before the solve, the coefficients span many decades
    for (int i = 0; i < 6; ++i) {
        const double s = std::max(M.row(i).cwiseAbs().maxCoeff(), 1e-300);
        M.row(i) /= s;
        rhs(i) /= s;
    }
    const Eigen::Matrix<double, 6, 1> x = M.partialPivLu().solve(rhs);
    return K0Residues{x(0), x(1), x(2), x(3), x(4), x(5)};
}

/// Modal ZOH realization of K0: a 2x2 integrator chain plus one 2x2 block per
/// quadratic pole pair, every transition computed in closed form. Keeps the
/// double discrete pole at z = 1 exact.
struct ModalK0 {
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> B = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 1, 6> C = Eigen::Matrix<double, 1, 6>::Zero();
    double Te = 0.0;

    static ModalK0 build(const ControllerCoefficients& c, double Te) {
        if (Te <= 0.0) throw Error("controller: sample period must be positive");
        const K0Residues r = k0_partial_fractions(c);
        ModalK0 m;
        m.Te = Te;

        // integrator chain: z1' = u, z2' = z1
        m.A.block<2, 2>(0, 0) << 1.0, 0.0, Te, 1.0;
        m.B.segment<2>(0) << Te, 0.5 * Te * Te;
        m.C(0, 0) = r.r1;
        m.C(0, 1) = r.r2;

        const auto add_pair = [&](int at, double cq, double dq, double e, double f) {
            const double disc = cq * cq - 4.0 * dq;
            if (disc >= 0.0)
                throw Error("controller: quadratic pole pair is not underdamped");
            const double sigma = -0.5 * cq;
            const double mu = 0.5 * std::sqrt(-disc);
            Eigen::Matrix2d Ac;
            Ac << sigma, mu, -mu, sigma;
            const Eigen::Vector2d Bc(1.0, 0.0);
            const double ea = std::exp(sigma * Te);
            Eigen::Matrix2d Ad;
            Ad << ea * std::cos(mu * Te), ea * std::sin(mu * Te),
                  -ea * std::sin(mu * Te), ea * std::cos(mu * Te);
            const Eigen::Vector2d Bd =
                Ac.inverse() * ((Ad - Eigen::Matrix2d::Identity()) * Bc);
            m.A.block<2, 2>(at, at) = Ad;
            m.B.segment<2>(at) = Bd;
            m.C(0, at) = e;
            m.C(0, at + 1) = -(f + e * sigma) / mu;
        };
        add_pair(2, c.c1, c.d1, r.e1, r.f1);
        add_pair(4, c.c2, c.d2, r.e2, r.f2);
        return m;
    }
};

} // namespace detail

/// Discrete speed controller of the stabilization loop: three identical K0
/// filters on the velocity error, then the configuration-dependent static map
/// J^-1 T^-1 turning the velocity command into joint rates.
class RateController {
public:
    RateController(const ControllerCoefficients& c, double Te)
        : modal_(detail::ModalK0::build(c, Te)) {
        reset();
    }

    void reset() {
        for (auto& x : state_) x.setZero();
    }

    double sample_period() const { return modal_.Te; }
    const detail::ModalK0& realization() const { return modal_; }

    /// Per-axis filter output for one sample (no kinematic map applied).
    Vec3 filter_step(const Vec3& eps_omega) {
        Vec3 y;
        for (int j = 0; j < 3; ++j) {
            y[j] = modal_.C * state_[j];
            state_[j] = modal_.A * state_[j] + modal_.B * eps_omega[j];
        }
        return y;
    }

    /// Full controller update: K0 on the velocity error, then the joint-rate
    /// command from the estimated configuration.
    Vec3 step(const Vec3& eps_omega, const DesignParameters& p, const Vec3& theta_hat,
              const Vec3& chi_hat) {
        const Vec3 y = filter_step(eps_omega);
        const KinematicMaps km = jacobians(p, theta_hat, chi_hat);
        if (std::abs(std::cos(chi_hat[1])) < kSingularDetTol)
            throw SingularT("controller: rate map T singular (elevation at +-pi/2)");
        const Vec3 t_inv_y = km.T.partialPivLu().solve(y);
        return km.J.partialPivLu().solve(t_inv_y);
    }

private:
    detail::ModalK0 modal_;
    std::array<Eigen::Matrix<double, 6, 1>, 3> state_{};
};

} // namespace cospm
