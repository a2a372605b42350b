#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cospm/config.hpp"
#include "cospm/controller.hpp"
#include "cospm/kinematics.hpp"
#include "cospm/simulation.hpp"
#include "cospm/singularity.hpp"
#include "cospm/transfer.hpp"

namespace {

using namespace cospm;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    bool deterministic = false;
};

RunConfig load_or_default(const CommonArgs& args) {
    if (args.config_path.empty()) return RunConfig{};
    return load_config(args.config_path);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(clock::now()) {}
    void report(const std::string& label) const {
        if (!enabled_) return;
        const double s = std::chrono::duration<double>(clock::now() - start_).count();
        std::printf("elapsed (%s): %.3f s\n", label.c_str(), s);
    }

private:
    using clock = std::chrono::steady_clock;
    bool enabled_;
    clock::time_point start_;
};

struct CheckRow {
    std::string name;
    bool pass;
    std::string detail;
};

void print_rows(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows)
        std::printf("[%s] %-24s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
}

int cmd_check(const CommonArgs& args) {
    const RunConfig cfg = load_or_default(args);
    Stopwatch sw(!args.deterministic);
    const DesignParameters& p = cfg.design;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rand_in = [&](double lo, double hi) { return lo + (hi - lo) * 0.5 * (u(rng) + 1.0); };

    std::vector<CheckRow> rows;

    {
        const double res = closure(p, home_joints(), Vec3::Zero()).cwiseAbs().maxCoeff();
        rows.push_back({"closure_at_home", res < 1e-12, "|f|_inf = " + format_full(res)});
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const Vec3 theta = home_joints() + Vec3(u(rng), u(rng), u(rng));
            const Vec3 chi(0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng));
            const double eps = u(rng);
            const Vec3 lhs = closure(p, theta + Vec3::Constant(eps), chi);
            const Vec3 rhs = closure(p, theta, chi + Vec3(0, 0, eps));
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        rows.push_back({"coaxiality", worst < 1e-12, "max residual = " + format_full(worst)});
    }
    {
        double worst = 0.0;
        bool ok = true;
        std::string note;
        for (int k = 0; k < 200 && ok; ++k) {
            const Vec3 chi(rand_in(cfg.workspace.chi1_lo, cfg.workspace.chi1_hi),
                           rand_in(cfg.workspace.chi2_lo, cfg.workspace.chi2_hi), 0.0);
            try {
                const Vec3 theta = igm(p, chi);
                const Vec3 seed = chi + Vec3::Constant(5e-3);
                const Vec3 back = fgm(p, theta, seed);
                worst = std::max(worst, (back - chi).cwiseAbs().maxCoeff());
            } catch (const Error& e) {
                ok = false;
                note = e.what();
            }
        }
        if (ok) {
            rows.push_back({"igm_fgm_roundtrip", worst < 1e-9,
                            "max orientation error = " + format_full(worst)});
        } else {
            rows.push_back({"igm_fgm_roundtrip", false, note});
        }
    }
    {
        double worst = 0.0;
        const double h = 1e-6;
        for (int k = 0; k < 100; ++k) {
            const Vec3 chi(rand_in(cfg.workspace.chi1_lo, cfg.workspace.chi1_hi),
                           rand_in(cfg.workspace.chi2_lo, cfg.workspace.chi2_hi), 0.5 * u(rng));
            Vec3 theta;
            try {
                theta = igm(p, chi);
            } catch (const Error&) {
                continue;
            }
            Mat3 j1, j2;
            detail::closure_jacobians_raw(p, theta, chi, j1, j2);
            for (int j = 0; j < 3; ++j) {
                Vec3 dc = Vec3::Zero(), dt = Vec3::Zero();
                dc[j] = h;
                dt[j] = h;
                const Vec3 g1 =
                    (closure(p, theta, chi + dc) - closure(p, theta, chi - dc)) / (2 * h);
                const Vec3 g2 =
                    (closure(p, theta + dt, chi) - closure(p, theta - dt, chi)) / (2 * h);
                worst = std::max(worst, (g1 - j1.col(j)).cwiseAbs().maxCoeff());
                worst = std::max(worst, (g2 - j2.col(j)).cwiseAbs().maxCoeff());
            }
        }
        rows.push_back(
            {"jacobian_vs_fd", worst < 1e-5, "max entry error = " + format_full(worst)});
    }

    print_rows(rows);
    sw.report("check");
    for (const auto& r : rows)
        if (!r.pass) return kExitCheckFailed;
    return kExitOk;
}

int cmd_scan(const CommonArgs& args, int n1, int n2) {
    const RunConfig cfg = load_or_default(args);
    Stopwatch sw(!args.deterministic);

    ScanOptions opts;
    opts.kantorovich = true;
    opts.wstar = cfg.workspace;
    const ScanResult scan = scan_type1(cfg.design, cfg.workspace, n1, n2, opts);
    const CertificationReport cert =
        certify_workspace(cfg.design, cfg.workspace, cfg.certify_step);

    if (!args.out_path.empty()) {
        auto out = open_output(args.out_path);
        write_scan_csv(out, scan);
    }

    std::printf("grid: %d x %d over bank [%g, %g] deg, elevation [%g, %g] deg\n", n1, n2,
                rad2deg(cfg.workspace.chi1_lo), rad2deg(cfg.workspace.chi1_hi),
                rad2deg(cfg.workspace.chi2_lo), rad2deg(cfg.workspace.chi2_hi));
    std::printf("min |Delta_i| over the workspace box: %.6g\n", scan.min_abs_delta_wstar);
    std::printf("fold loci edges inside the box: %d\n", scan.loci_cells_wstar);
    std::printf("kantorovich certification (step %.3g deg): %s (%d of %d cells failed)\n",
                rad2deg(cfg.certify_step), cert.all_pass ? "all_pass" : "FAILED",
                static_cast<int>(cert.failures.size()), cert.cells);
    for (size_t i = 0; i < cert.failures.size() && i < 10; ++i)
        std::printf("  failure at chi = (%.4f, %.4f, %.4f) deg\n",
                    rad2deg(cert.failures[i][0]), rad2deg(cert.failures[i][1]),
                    rad2deg(cert.failures[i][2]));
    if (cert.failures.size() > 10)
        std::printf("  ... %zu more\n", cert.failures.size() - 10);
    const bool free_of_loci = scan.loci_cells_wstar == 0;
    std::printf("workspace singularity-free: %s\n",
                free_of_loci && cert.all_pass ? "yes" : "no");
    sw.report("scan");
    return free_of_loci && cert.all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_margins(const CommonArgs& args, int freq_points) {
    const RunConfig cfg = load_or_default(args);
    Stopwatch sw(!args.deterministic);
    const double tau_m = cfg.actuator.tau_m, Te = cfg.Te;

    const Margins m = margins(cfg.controller, tau_m, Te);
    std::printf("GM = %.2f dB at %.4g rad/s\n", m.gain_margin_db, m.phase_crossover_rad_s);
    std::printf("PM = %.2f deg at %.4g rad/s\n", m.phase_margin_deg, m.gain_crossover_rad_s);

    const double w1 = 2.0 * pi * 0.1;
    const double d_db = 20.0 * std::log10(std::abs(disturbance_transfer(cfg.controller, tau_m, Te, w1)));
    std::printf("|D(%.3g rad/s)| = %.2f dB\n", w1, d_db);

    if (!args.out_path.empty()) {
        auto out = open_output(args.out_path);
        write_frequency_csv(
            out, [&](double w) { return open_loop_response(cfg.controller, tau_m, Te, w); },
            1e-2, 1e5, freq_points);
    }
    sw.report("margins");
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = load_or_default(args);
    Stopwatch sw(!args.deterministic);

    const SimulationTrace tr = run(cfg.simulation());
    if (!args.out_path.empty()) {
        auto out = open_output(args.out_path);
        write_trace_csv(out, tr);
    }

    const double t_start = std::min(15.0, 0.5 * cfg.duration);
    const SteadyStateMetrics m = steady_state_metrics(tr, t_start);
    std::printf("samples: %zu, steady-state window [%g, %g] s\n", tr.size(), t_start,
                cfg.duration);
    std::printf("max |eps|        = %.6g rad\n", m.max_abs_residual);
    std::printf("max |eps_omega|  = %.6g rad/s\n", m.max_abs_speed_error);
    std::printf("max |theta_dot|  = %.6g rad/s\n", m.max_abs_joint_rate);
    const bool requirement = m.max_abs_residual < 1e-4;
    std::printf("residual requirement (< 1e-4 rad): %s\n", requirement ? "PASS" : "FAIL");
    std::printf("reference figure (< 6e-6 rad): %s\n",
                m.max_abs_residual < 6e-6 ? "met" : "not met");
    sw.report("simulate");
    return requirement ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinematics, certification and closed-loop simulation toolkit for a "
                 "coaxial spherical parallel manipulator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string grid = "200x200";
    int freq_points = 500;

    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("config", args.config_path, "Config file (defaults when omitted)");
        if (with_out) sub->add_option("--out", args.out_path, "Output CSV path");
        sub->add_flag("--deterministic", args.deterministic, "Suppress timing output");
    };

    CLI::App* defaults = app.add_subcommand("defaults", "Emit the default config file");
    defaults->add_option("--out", args.out_path, "Write to a file instead of stdout");

    CLI::App* check = app.add_subcommand("check", "Run the kinematic self-checks");
    add_common(check, false);

    CLI::App* scan = app.add_subcommand("scan", "Scan discriminants and certify the workspace");
    add_common(scan, true);
    scan->add_option("--grid", grid, "Scan grid as N1xN2 (default 200x200)");

    CLI::App* marg = app.add_subcommand("margins", "Open-loop margins and disturbance transfer");
    add_common(marg, true);
    marg->add_option("--freq-points", freq_points, "Rows in the frequency CSV");

    CLI::App* sim = app.add_subcommand("simulate", "Run the closed-loop stabilization");
    add_common(sim, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*defaults) {
            const RunConfig cfg{};
            if (args.out_path.empty()) {
                write_config(std::cout, cfg);
            } else {
                auto out = open_output(args.out_path);
                write_config(out, cfg);
            }
            return kExitOk;
        }
        if (*check) return cmd_check(args);
        if (*scan) {
            int n1 = 0, n2 = 0;
            if (std::sscanf(grid.c_str(), "%dx%d", &n1, &n2) != 2 || n1 < 2 || n2 < 2) {
                std::fprintf(stderr, "error: --grid expects N1xN2 with N1, N2 >= 2\n");
                return kExitUsage;
            }
            return cmd_scan(args, n1, n2);
        }
        if (*marg) return cmd_margins(args, freq_points);
        if (*sim) return cmd_simulate(args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    }
    return kExitUsage;
}
