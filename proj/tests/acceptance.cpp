// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cospm/config.hpp"
#include "cospm/kinematics.hpp"
#include "cospm/simulation.hpp"
#include "cospm/singularity.hpp"
#include "cospm/transfer.hpp"

using namespace cospm;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const DesignParameters kTable1 = DesignParameters::table1();

void criterion_home_closure() {
    const double res = closure(kTable1, home_joints(), Vec3::Zero()).cwiseAbs().maxCoeff();
    report(1, "home configuration closes", res < 1e-12, "|f|_inf = " + fmt(res) + " (tol 1e-12)");
}

void criterion_coaxiality() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Vec3 theta = home_joints() + Vec3(u(rng), u(rng), u(rng));
        const Vec3 chi(0.8 * u(rng), 0.8 * u(rng), 2.5 * u(rng));
        const double eps = 2.0 * u(rng);
        const Vec3 lhs = closure(kTable1, theta + Vec3::Constant(eps), chi);
        const Vec3 rhs = closure(kTable1, theta, chi + Vec3(0, 0, eps));
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    report(2, "coaxiality identity", worst < 1e-12, "max residual = " + fmt(worst) + " (tol 1e-12)");
}

void criterion_roundtrip() {
    const WorkspaceBox w = WorkspaceBox::prescribed();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            const Vec3 chi(w.chi1_lo + (w.chi1_hi - w.chi1_lo) * i / 49.0,
                           w.chi2_lo + (w.chi2_hi - w.chi2_lo) * j / 49.0, 0.0);
            const Vec3 theta = igm(kTable1, chi);
            const Vec3 back = fgm(kTable1, theta, chi + Vec3::Constant(2e-3));
            worst = std::max(worst, (back - chi).cwiseAbs().maxCoeff());
        }
    }
    report(3, "igm/fgm roundtrip on a 50x50 grid", worst < 1e-9,
           "max orientation error = " + fmt(worst) + " rad (tol 1e-9)");
}

void criterion_jacobians() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-6;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vec3 chi(deg2rad(10.0) * u(rng), deg2rad(50.0) * u(rng), u(rng));
        const Vec3 theta = igm(kTable1, chi);
        Mat3 j1, j2;
        detail::closure_jacobians_raw(kTable1, theta, chi, j1, j2);
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = h;
            const Vec3 g1 =
                (closure(kTable1, theta, chi + e) - closure(kTable1, theta, chi - e)) / (2 * h);
            const Vec3 g2 =
                (closure(kTable1, theta + e, chi) - closure(kTable1, theta - e, chi)) / (2 * h);
            worst = std::max(worst, (g1 - j1.col(j)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (g2 - j2.col(j)).cwiseAbs().maxCoeff());
        }
    }
    report(4, "jacobians vs central differences", worst < 1e-5,
           "max entry error = " + fmt(worst) + " (tol 1e-5)");
}

void criterion_scan() {
    const ScanResult res = scan_type1(kTable1, WorkspaceBox::prescribed(), 200, 200);
    report(5, "type-1 scan of the prescribed workspace", res.loci_cells_wstar == 0,
           "sign-change edges = " + std::to_string(res.loci_cells_wstar) +
               ", min |Delta| = " + fmt(res.min_abs_delta_wstar));
}

void criterion_certification() {
    const auto rep = certify_workspace(kTable1, WorkspaceBox::prescribed(), deg2rad(1.0));
    report(6, "kantorovich certification at 1 deg step", rep.all_pass,
           std::to_string(rep.failures.size()) + " of " + std::to_string(rep.cells) +
               " cells failed");
}

void criterion_margins() {
    const ControllerCoefficients c{};
    const double tau_m = 1.6e-3, Te = 1e-3;
    const Margins m = margins(c, tau_m, Te);
    const double d_db =
        20.0 * std::log10(std::abs(disturbance_transfer(c, tau_m, Te, 2.0 * pi * 0.1)));
    const bool gm_ok = std::abs(m.gain_margin_db - 14.2) <= 0.5;
    const bool pm_ok = std::abs(m.phase_margin_deg - 60.0) <= 1.0;
    const bool d_ok = std::abs(d_db - (-90.0)) <= 3.0;
    report(7, "frequency-domain numbers", gm_ok && pm_ok && d_ok,
           "GM = " + fmt(m.gain_margin_db) + " dB (14.2 +- 0.5: " + (gm_ok ? "ok" : "OUT") +
               "), PM = " + fmt(m.phase_margin_deg) + " deg (60 +- 1: " + (pm_ok ? "ok" : "OUT") +
               "), |D| = " + fmt(d_db) + " dB (-90 +- 3: " + (d_ok ? "ok" : "OUT") + ")");
}

SimulationTrace reference_run() {
    SimulationConfig cfg;  // paper defaults throughout
    return run(cfg);
}

void criterion_closed_loop(const SimulationTrace& tr) {
    const SteadyStateMetrics m = steady_state_metrics(tr, 15.0);
    const bool figure_ok = m.max_abs_residual < 6e-6;
    const bool requirement_ok = m.max_abs_residual < 1e-4;
    const bool speed_ok = m.max_abs_speed_error < 1e-5;
    report(8, "closed-loop steady state", figure_ok && requirement_ok && speed_ok,
           "max|eps| = " + fmt(m.max_abs_residual) + " rad (< 6e-6: " +
               (figure_ok ? "ok" : "OUT") + ", < 1e-4: " + (requirement_ok ? "ok" : "OUT") +
               "), max|eps_w| = " + fmt(m.max_abs_speed_error) + " rad/s (< 1e-5: " +
               (speed_ok ? "ok" : "OUT") + ")");
}

void criterion_frequency_consistency() {
    bool all_ok = true;
    std::string detail;
    for (int axis : {0, 1}) {
        const double f = axis == 0 ? 0.1 : 0.075;
        SimulationConfig cfg;
        cfg.disturbance.amplitude = Vec3::Zero();
        cfg.disturbance.amplitude[axis] = deg2rad(10.0);
        cfg.disturbance.frequency_hz = Vec3::Zero();
        cfg.disturbance.frequency_hz[axis] = f;
        cfg.actuator.disturbance = Vec3::Zero();
        const SimulationTrace tr = run(cfg);

        const double w = 2.0 * pi * f;
        const double predicted =
            std::abs(disturbance_transfer(cfg.controller, cfg.actuator.tau_m, cfg.Te, w)) * w *
            deg2rad(10.0);
        double lo = 0.0, hi = 0.0;
        for (size_t k = 0; k < tr.size(); ++k) {
            if (tr.t[k] < 15.0) continue;
            lo = std::min(lo, tr.eps_omega[k][axis]);
            hi = std::max(hi, tr.eps_omega[k][axis]);
        }
        const double measured = 0.5 * (hi - lo);
        const double ratio = measured / predicted;
        all_ok = all_ok && ratio > 0.8 && ratio < 1.2;
        if (!detail.empty()) detail += "; ";
        detail += "f = " + fmt(f) + " Hz: measured/predicted = " + fmt(ratio);
    }
    report(9, "time/frequency consistency", all_ok, detail + " (within 20%)");
}

void criterion_manifold_and_determinism(const SimulationTrace& tr) {
    double worst = 0.0;
    for (size_t k = 0; k < tr.size(); ++k)
        worst = std::max(worst,
                         closure(kTable1, tr.theta[k], tr.chi[k]).cwiseAbs().maxCoeff());
    const SimulationTrace again = reference_run();
    std::ostringstream a, b;
    write_trace_csv(a, tr);
    write_trace_csv(b, again);
    const bool identical = a.str() == b.str();
    report(10, "closure manifold and determinism", worst < 1e-9 && identical,
           "max closure residual = " + fmt(worst) + " (tol 1e-9), reruns byte-identical: " +
               (identical ? "yes" : "NO"));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_home_closure();
    criterion_coaxiality();
    criterion_roundtrip();
    criterion_jacobians();
    criterion_scan();
    criterion_certification();
    criterion_margins();
    const SimulationTrace reference = reference_run();
    criterion_closed_loop(reference);
    criterion_frequency_consistency();
    criterion_manifold_and_determinism(reference);
    std::printf("%d of 10 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
