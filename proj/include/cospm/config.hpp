#pragma once

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "cospm/angles.hpp"
#include "cospm/design.hpp"
#include "cospm/errors.hpp"
#include "cospm/simulation.hpp"
#include "cospm/singularity.hpp"

namespace cospm {

/// One runnable setup: design, workspace, controller, actuator, disturbance
/// and simulation settings. File angles are degrees, everything internal is
/// radians.
struct RunConfig {
    DesignParameters design;
    WorkspaceBox workspace;
    double certify_step = deg2rad(1.0);
    ControllerCoefficients controller;
    ActuatorParameters actuator;
    DisturbanceProfile disturbance;

    double duration = 30.0;
    double Te = 1e-3;
    int substeps = 10;
    Vec3 reference = Vec3::Zero();
    Vec3 initial_chi = Vec3::Zero();
    Vec3 initial_theta = home_joints();

    SimulationConfig simulation() const {
        SimulationConfig s;
        s.duration = duration;
        s.Te = Te;
        s.substeps = substeps;
        s.design = design;
        s.actuator = actuator;
        s.controller = controller;
        s.disturbance = disturbance;
        s.reference = reference;
        s.initial_chi = initial_chi;
        s.initial_theta = initial_theta;
        return s;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct ConfigBinder {
    struct Entry {
        std::function<void(RunConfig&, const std::string&)> set;
        std::function<std::string(const RunConfig&)> get;
    };
    std::map<std::string, Entry> entries;  // "section.key" -> accessors
    std::vector<std::string> order;

    static double parse_number(const std::string& key, const std::string& v) {
        try {
            size_t pos = 0;
            const double x = std::stod(v, &pos);
            while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config: invalid number for " + key + ": '" + v + "'");
        }
    }

    void number(const std::string& name, std::function<double&(RunConfig&)> ref,
                bool degrees = false) {
        Entry e;
        e.set = [name, ref, degrees](RunConfig& c, const std::string& v) {
            ref(c) = degrees ? deg2rad(parse_number(name, v)) : parse_number(name, v);
        };
        e.get = [ref, degrees](const RunConfig& c) {
            RunConfig& mut = const_cast<RunConfig&>(c);
            return format_full(degrees ? rad2deg(ref(mut)) : ref(mut));
        };
        entries[name] = std::move(e);
        order.push_back(name);
    }

    void integer(const std::string& name, std::function<int&(RunConfig&)> ref) {
        Entry e;
        e.set = [name, ref](RunConfig& c, const std::string& v) {
            const double x = parse_number(name, v);
            if (x != std::floor(x)) throw ConfigError("config: " + name + " must be an integer");
            ref(c) = static_cast<int>(x);
        };
        e.get = [ref](const RunConfig& c) {
            return std::to_string(ref(const_cast<RunConfig&>(c)));
        };
        entries[name] = std::move(e);
        order.push_back(name);
    }

    void mode(const std::string& name) {
        Entry e;
        e.set = [name](RunConfig& c, const std::string& v) {
            if (v == "unit_step") c.actuator.mode = ActuatorParameters::Mode::unit_step;
            else if (v == "coulomb") c.actuator.mode = ActuatorParameters::Mode::coulomb;
            else throw ConfigError("config: " + name + " must be unit_step or coulomb");
        };
        e.get = [](const RunConfig& c) {
            return c.actuator.mode == ActuatorParameters::Mode::unit_step
                       ? std::string("unit_step")
                       : std::string("coulomb");
        };
        entries[name] = std::move(e);
        order.push_back(name);
    }

    static const ConfigBinder& instance();
};

inline const ConfigBinder& ConfigBinder::instance() {
    static const ConfigBinder binder = [] {
        ConfigBinder b;
        auto num = [&](const char* n, auto ref, bool deg = false) {
            b.number(n, ref, deg);
        };
        for (int i = 0; i < 3; ++i) {
            const std::string leg = std::to_string(i + 1);
            num(("design.alpha1_" + leg + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.design.alpha1[i]; }, true);
            num(("design.alpha2_" + leg + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.design.alpha2[i]; }, true);
            num(("design.eta_" + leg + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.design.eta[i]; }, true);
        }
        num("design.beta1_deg", [](RunConfig& c) -> double& { return c.design.beta1; }, true);
        num("design.beta2_deg", [](RunConfig& c) -> double& { return c.design.beta2; }, true);

        num("workspace.chi1_min_deg", [](RunConfig& c) -> double& { return c.workspace.chi1_lo; }, true);
        num("workspace.chi1_max_deg", [](RunConfig& c) -> double& { return c.workspace.chi1_hi; }, true);
        num("workspace.chi2_min_deg", [](RunConfig& c) -> double& { return c.workspace.chi2_lo; }, true);
        num("workspace.chi2_max_deg", [](RunConfig& c) -> double& { return c.workspace.chi2_hi; }, true);
        num("workspace.chi3_deg", [](RunConfig& c) -> double& { return c.workspace.chi3; }, true);
        num("workspace.certify_step_deg", [](RunConfig& c) -> double& { return c.certify_step; }, true);

        num("controller.k0bar", [](RunConfig& c) -> double& { return c.controller.K0bar; });
        num("controller.a1", [](RunConfig& c) -> double& { return c.controller.a1; });
        num("controller.a2", [](RunConfig& c) -> double& { return c.controller.a2; });
        num("controller.a3", [](RunConfig& c) -> double& { return c.controller.a3; });
        num("controller.b1", [](RunConfig& c) -> double& { return c.controller.b1; });
        num("controller.b2", [](RunConfig& c) -> double& { return c.controller.b2; });
        num("controller.c1", [](RunConfig& c) -> double& { return c.controller.c1; });
        num("controller.d1", [](RunConfig& c) -> double& { return c.controller.d1; });
        num("controller.c2", [](RunConfig& c) -> double& { return c.controller.c2; });
        num("controller.d2", [](RunConfig& c) -> double& { return c.controller.d2; });

        num("actuator.tau_m_s", [](RunConfig& c) -> double& { return c.actuator.tau_m; });
        b.mode("actuator.mode");
        for (int i = 0; i < 3; ++i)
            num(("actuator.disturbance_" + std::to_string(i + 1)).c_str(),
                [i](RunConfig& c) -> double& { return c.actuator.disturbance[i]; });

        for (int i = 0; i < 3; ++i) {
            const std::string ax = std::to_string(i + 1);
            num(("disturbance.amplitude_" + ax + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.disturbance.amplitude[i]; }, true);
            num(("disturbance.frequency_" + ax + "_hz").c_str(),
                [i](RunConfig& c) -> double& { return c.disturbance.frequency_hz[i]; });
            num(("disturbance.phase_" + ax + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.disturbance.phase[i]; }, true);
        }

        num("simulation.duration_s", [](RunConfig& c) -> double& { return c.duration; });
        num("simulation.sample_period_s", [](RunConfig& c) -> double& { return c.Te; });
        b.integer("simulation.substeps", [](RunConfig& c) -> int& { return c.substeps; });
        for (int i = 0; i < 3; ++i) {
            const std::string ax = std::to_string(i + 1);
            num(("simulation.reference_" + ax).c_str(),
                [i](RunConfig& c) -> double& { return c.reference[i]; });
            num(("simulation.initial_chi_" + ax + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.initial_chi[i]; }, true);
            num(("simulation.initial_theta_" + ax + "_deg").c_str(),
                [i](RunConfig& c) -> double& { return c.initial_theta[i]; }, true);
        }
        return b;
    }();
    return binder;
}

} // namespace detail

/// Parses a key-value config with [section] headers. Unknown sections or keys
/// are rejected; missing keys keep their defaults.
inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    const auto& binder = detail::ConfigBinder::instance();
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = binder.entries.find(full);
        if (it == binder.entries.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + full +
                              "'");
        it->second.set(cfg, value);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

/// Emits the config in the file format, defaults included.
inline void write_config(std::ostream& os, const RunConfig& cfg) {
    const auto& binder = detail::ConfigBinder::instance();
    std::string section;
    for (const std::string& name : binder.order) {
        const size_t dot = name.find('.');
        const std::string sec = name.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) os << '\n';
            os << '[' << sec << "]\n";
            section = sec;
        }
        os << name.substr(dot + 1) << " = " << binder.entries.at(name).get(cfg) << '\n';
    }
}

} // namespace cospm
