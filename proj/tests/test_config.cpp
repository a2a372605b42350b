#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "cospm/config.hpp"

using namespace cospm;

TEST_CASE("defaults round-trip bit exactly") {
    const RunConfig def{};
    std::ostringstream os;
    write_config(os, def);
    std::istringstream is(os.str());
    const RunConfig back = parse_config(is);

    for (int i = 0; i < 3; ++i) {
        CHECK(back.design.alpha1[i] == def.design.alpha1[i]);
        CHECK(back.design.alpha2[i] == def.design.alpha2[i]);
        CHECK(back.design.eta[i] == def.design.eta[i]);
        CHECK(back.disturbance.amplitude[i] == def.disturbance.amplitude[i]);
        CHECK(back.disturbance.frequency_hz[i] == def.disturbance.frequency_hz[i]);
        CHECK(back.initial_theta[i] == def.initial_theta[i]);
        CHECK(back.actuator.disturbance[i] == def.actuator.disturbance[i]);
    }
    CHECK(back.design.beta1 == def.design.beta1);
    CHECK(back.design.beta2 == def.design.beta2);
    CHECK(back.workspace.chi1_lo == def.workspace.chi1_lo);
    CHECK(back.workspace.chi2_hi == def.workspace.chi2_hi);
    CHECK(back.certify_step == def.certify_step);
    CHECK(back.controller.K0bar == def.controller.K0bar);
    CHECK(back.controller.d2 == def.controller.d2);
    CHECK(back.actuator.tau_m == def.actuator.tau_m);
    CHECK(back.Te == def.Te);
    CHECK(back.duration == def.duration);
    CHECK(back.substeps == def.substeps);
}

TEST_CASE("default values carry the reference setup") {
    const RunConfig def{};
    CHECK(def.design.alpha1[0] == Catch::Approx(pi / 4));
    CHECK(def.design.alpha1[2] == Catch::Approx(pi / 2));
    CHECK(def.design.eta[1] == Catch::Approx(-pi / 4));
    CHECK(def.design.beta1 == 0.0);
    CHECK(def.controller.K0bar == 25884.0);
    CHECK(def.actuator.tau_m == 1.6e-3);
    CHECK(def.Te == 1e-3);
    CHECK(def.duration == 30.0);
    CHECK(def.disturbance.amplitude[0] == Catch::Approx(deg2rad(10.0)));
    CHECK(def.disturbance.frequency_hz[1] == 0.075);
}

TEST_CASE("degrees convert at the boundary") {
    std::istringstream is("[design]\nalpha1_1_deg = 30\n[disturbance]\namplitude_3_deg = 5\n");
    const RunConfig cfg = parse_config(is);
    CHECK(cfg.design.alpha1[0] == Catch::Approx(pi / 6));
    CHECK(cfg.disturbance.amplitude[2] == Catch::Approx(deg2rad(5.0)));
    // untouched keys keep defaults
    CHECK(cfg.design.alpha1[1] == Catch::Approx(pi / 4));
}

TEST_CASE("unknown keys are rejected") {
    std::istringstream a("[design]\nbogus = 1\n");
    CHECK_THROWS_AS(parse_config(a), ConfigError);
    std::istringstream b("[nosuchsection]\nalpha1_1_deg = 30\n");
    CHECK_THROWS_AS(parse_config(b), ConfigError);
    std::istringstream c("alpha1_1_deg = 30\n");  // key without its section
    CHECK_THROWS_AS(parse_config(c), ConfigError);
}

TEST_CASE("malformed values are rejected") {
    std::istringstream a("[design]\nalpha1_1_deg = fast\n");
    CHECK_THROWS_AS(parse_config(a), ConfigError);
    std::istringstream b("[simulation]\nsubsteps = 2.5\n");
    CHECK_THROWS_AS(parse_config(b), ConfigError);
    std::istringstream c("[actuator]\nmode = sticky\n");
    CHECK_THROWS_AS(parse_config(c), ConfigError);
    std::istringstream d("[design]\nalpha1_1_deg 30\n");
    CHECK_THROWS_AS(parse_config(d), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    std::istringstream is("# leading comment\n\n[actuator]\n"
                          "tau_m_s = 0.002 ; trailing comment\nmode = coulomb\n");
    const RunConfig cfg = parse_config(is);
    CHECK(cfg.actuator.tau_m == 0.002);
    CHECK(cfg.actuator.mode == ActuatorParameters::Mode::coulomb);
}

TEST_CASE("missing files raise config errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/path/cfg.ini"), ConfigError);
}
