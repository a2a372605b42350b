#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cospm/angles.hpp"
#include "cospm/controller.hpp"
#include "cospm/csv.hpp"
#include "cospm/design.hpp"
#include "cospm/errors.hpp"
#include "cospm/kinematics.hpp"

namespace cospm {

/// Carrier wave disturbance nu_i(t) = amplitude_i cos(2 pi f_i t + phase_i).
struct DisturbanceProfile {
    Vec3 amplitude{deg2rad(10.0), deg2rad(10.0), 0.0};
    Vec3 frequency_hz{0.1, 0.075, 0.0};
    Vec3 phase = Vec3::Zero();

    void validate() const {
        for (int i = 0; i < 3; ++i)
            if (frequency_hz[i] < 0.0) throw ConfigError("disturbance: frequencies must be >= 0");
    }
};

/// Carrier angles and their rates at time t.
inline std::pair<Vec3, Vec3> disturbance_at(const DisturbanceProfile& d, double t) {
    Vec3 nu, nu_dot;
    for (int i = 0; i < 3; ++i) {
        const double w = 2.0 * pi * d.frequency_hz[i];
        nu[i] = d.amplitude[i] * std::cos(w * t + d.phase[i]);
        nu_dot[i] = -w * d.amplitude[i] * std::sin(w * t + d.phase[i]);
    }
    return {nu, nu_dot};
}

struct SimulationConfig {
    double duration = 30.0;
    double Te = 1e-3;
    int substeps = 10;

    DesignParameters design;
    ActuatorParameters actuator;
    ControllerCoefficients controller;
    DisturbanceProfile disturbance;

    Vec3 reference = Vec3::Zero();      // commanded inertial velocity of the sight
    Vec3 initial_chi = Vec3::Zero();
    Vec3 initial_theta = home_joints();

    void validate() const {
        if (!(duration > 0.0)) throw ConfigError("simulation: duration must be positive");
        if (!(Te > 0.0)) throw ConfigError("simulation: sample period must be positive");
        if (substeps < 1) throw ConfigError("simulation: substeps must be >= 1");
        design.validate();
        actuator.validate();
        disturbance.validate();
        const double res = closure(design, initial_theta, initial_chi).cwiseAbs().maxCoeff();
        if (res > 1e-10)
            throw ConfigError("simulation: initial pose violates the closure (|f| = " +
                              format_full(res) + ")");
    }
};

/// Time-indexed record of one closed-loop run, one row per sample.
struct SimulationTrace {
    std::vector<double> t;
    std::vector<Vec3> omega_true;     // inertial velocity of the sight, LOS frame
    std::vector<Vec3> eps_omega;      // velocity error seen by the controller
    std::vector<Vec3> eps;            // stabilization residual (trapezoid integral)
    std::vector<Vec3> theta, theta_dot, chi;
    std::vector<Vec3> omega_carrier;  // carrier disturbance velocity, LOS frame

    size_t size() const { return t.size(); }

    void reserve(size_t n) {
        t.reserve(n);
        omega_true.reserve(n);
        eps_omega.reserve(n);
        eps.reserve(n);
        theta.reserve(n);
        theta_dot.reserve(n);
        chi.reserve(n);
        omega_carrier.reserve(n);
    }
};

inline void write_trace_csv(std::ostream& os, const SimulationTrace& tr) {
    os << "t,om1,om2,om3,eps1,eps2,eps3,epsw1,epsw2,epsw3,"
          "th1,th2,th3,dth1,dth2,dth3,chi1,chi2,chi3,dist1,dist2,dist3\n";
    for (size_t k = 0; k < tr.size(); ++k) {
        os << format_full(tr.t[k]);
        auto put = [&](const Vec3& v) {
            os << ',' << format_full(v[0]) << ',' << format_full(v[1]) << ','
               << format_full(v[2]);
        };
        put(tr.omega_true[k]);
        put(tr.eps[k]);
        put(tr.eps_omega[k]);
        put(tr.theta[k]);
        put(tr.theta_dot[k]);
        put(tr.chi[k]);
        put(tr.omega_carrier[k]);
        os << '\n';
    }
}

struct PlantState {
    Vec3 theta = home_joints();
    Vec3 theta_dot = Vec3::Zero();
    Vec3 chi = Vec3::Zero();
};

namespace detail {

inline Vec3 actuator_input_disturbance(const ActuatorParameters& a, const Vec3& theta_dot) {
    if (a.mode == ActuatorParameters::Mode::unit_step) return a.disturbance;
    Vec3 d;
    for (int i = 0; i < 3; ++i)  // smoothed sign, avoids chatter at fixed step
        d[i] = -a.disturbance[i] * std::tanh(theta_dot[i] / 1e-4);
    return d;
}

} // namespace detail

/// Advances the actuated joints over dt under a held rate command: per-axis
/// first order lag toward (command + input disturbance), integrated with RK4
/// substeps, then the orientation is re-solved on the closure manifold.
inline void plant_step(PlantState& s, const DesignParameters& p, const ActuatorParameters& act,
                       const Vec3& command, double dt, int substeps = 10) {
    if (!(dt > 0.0)) throw SimulationError("plant_step: dt must be positive");
    const double h = dt / substeps;
    using State6 = Eigen::Matrix<double, 6, 1>;
    State6 x;
    x << s.theta, s.theta_dot;
    auto deriv = [&](const State6& v) {
        State6 dv;
        const Vec3 rate = v.tail<3>();
        const Vec3 d = detail::actuator_input_disturbance(act, rate);
        dv.head<3>() = rate;
        dv.tail<3>() = (command + d - rate) / act.tau_m;
        return dv;
    };
    for (int k = 0; k < substeps; ++k) {
        const State6 k1 = deriv(x);
        const State6 k2 = deriv(x + 0.5 * h * k1);
        const State6 k3 = deriv(x + 0.5 * h * k2);
        const State6 k4 = deriv(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s.theta = x.head<3>();
    s.theta_dot = x.tail<3>();
    s.chi = fgm(p, s.theta, s.chi);
}

/// Runs the discrete-time stabilization loop and records the trace.
///
/// Per sample: the true inertial velocity of the sight is formed from the
/// current plant state and the carrier disturbance, the sensor reports it one
/// sample late, the controller turns the velocity error into a joint-rate
/// command, and the plant integrates it across the sample period.
inline SimulationTrace run(const SimulationConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(std::llround(cfg.duration / cfg.Te));
    SimulationTrace tr;
    tr.reserve(n + 1);

    PlantState st;
    st.theta = cfg.initial_theta;
    st.chi = cfg.initial_chi;
    RateController controller(cfg.controller, cfg.Te);
    Vec3 delayed_omega = Vec3::Zero();
    Vec3 eps = Vec3::Zero();
    Vec3 prev_eps_omega = Vec3::Zero();

    for (int k = 0; k <= n; ++k) {
        const double t = k * cfg.Te;
        try {
            const auto [nu, nu_dot] = disturbance_at(cfg.disturbance, t);
            const KinematicMaps km = jacobians(cfg.design, st.theta, st.chi);
            const Vec3 chi_dot = km.J * st.theta_dot;
            const Vec3 omega_dist = carrier_disturbance(st.chi, nu, nu_dot);
            const Vec3 omega_true = km.T * chi_dot + omega_dist;

            const Vec3 omega_hat = delayed_omega;  // one-sample sensor delay
            delayed_omega = omega_true;
            const Vec3 eps_omega = cfg.reference - omega_hat;
            if (k > 0) eps += 0.5 * cfg.Te * (prev_eps_omega + eps_omega);
            prev_eps_omega = eps_omega;

            tr.t.push_back(t);
            tr.omega_true.push_back(omega_true);
            tr.eps_omega.push_back(eps_omega);
            tr.eps.push_back(eps);
            tr.theta.push_back(st.theta);
            tr.theta_dot.push_back(st.theta_dot);
            tr.chi.push_back(st.chi);
            tr.omega_carrier.push_back(omega_dist);
            if (k == n) break;

            const Vec3 command = controller.step(eps_omega, cfg.design, st.theta, st.chi);
            plant_step(st, cfg.design, cfg.actuator, command, cfg.Te, cfg.substeps);
        } catch (const Error& e) {
            throw SimulationError("sample " + std::to_string(k) + " (t = " + format_full(t) +
                                  " s): " + e.what());
        }
    }
    return tr;
}

struct SteadyStateMetrics {
    double max_abs_residual = 0.0;     // rad
    double max_abs_speed_error = 0.0;  // rad/s
    double max_abs_joint_rate = 0.0;   // rad/s
};

/// Maxima of |eps|, |eps_omega| and |theta_dot| over [t_start, end of trace].
inline SteadyStateMetrics steady_state_metrics(const SimulationTrace& tr, double t_start) {
    if (tr.size() == 0) throw SimulationError("steady_state_metrics: empty trace");
    if (t_start >= tr.t.back())
        throw SimulationError("steady_state_metrics: t_start beyond the trace");
    SteadyStateMetrics m;
    for (size_t k = 0; k < tr.size(); ++k) {
        if (tr.t[k] < t_start) continue;
        m.max_abs_residual = std::max(m.max_abs_residual, tr.eps[k].cwiseAbs().maxCoeff());
        m.max_abs_speed_error =
            std::max(m.max_abs_speed_error, tr.eps_omega[k].cwiseAbs().maxCoeff());
        m.max_abs_joint_rate =
            std::max(m.max_abs_joint_rate, tr.theta_dot[k].cwiseAbs().maxCoeff());
    }
    return m;
}

} // namespace cospm
