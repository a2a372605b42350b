#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef COSPM_CLI_PATH
#error "COSPM_CLI_PATH must point at the command line binary"
#endif

namespace {

struct CommandResult {
    int exit_code;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const std::string tmp = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                            "/cospm_cli_out.txt";
    const std::string cmd = std::string(COSPM_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    int code = -1;
    if (WIFEXITED(status)) code = WEXITSTATUS(status);
    return {code, ss.str()};
}

std::string write_temp_config(const std::string& body, const std::string& name) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

} // namespace

TEST_CASE("cli: defaults emits a parseable config") {
    const auto res = run_cli("defaults");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("[design]") != std::string::npos);
    CHECK(res.output.find("alpha1_1_deg = 45") != std::string::npos);
    CHECK(res.output.find("k0bar = 25884") != std::string::npos);
}

TEST_CASE("cli: check passes on the default setup") {
    const auto res = run_cli("check --deterministic");
    INFO(res.output);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("[PASS] closure_at_home") != std::string::npos);
    CHECK(res.output.find("FAIL") == std::string::npos);
}

TEST_CASE("cli: check fails for a non-coaxial design") {
    const std::string cfg = write_temp_config("[design]\nbeta1_deg = 17\n", "noncoaxial.ini");
    const auto res = run_cli("check --deterministic " + cfg);
    INFO(res.output);
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("[FAIL] coaxiality") != std::string::npos);
}

TEST_CASE("cli: missing config file exits with a usage error") {
    const auto res = run_cli("check /nonexistent.ini");
    CHECK(res.exit_code == 2);
}

TEST_CASE("cli: malformed config exits with a usage error") {
    const std::string cfg = write_temp_config("[design]\nwhat = 1\n", "badkey.ini");
    const auto res = run_cli("simulate --deterministic " + cfg);
    CHECK(res.exit_code == 2);
}

TEST_CASE("cli: scan smoke run produces the csv") {
    const std::string out = "/tmp/cospm_scan_smoke.csv";
    const auto res = run_cli("scan --deterministic --grid 2x2 --out " + out);
    INFO(res.output);
    CHECK(res.exit_code == 0);
    std::ifstream csv(out);
    std::string line;
    int rows = 0;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "chi1,chi2,delta1,delta2,delta3,kantorovich_pass");
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("cli: margins reports the loop numbers") {
    const auto res = run_cli("margins --deterministic --out /tmp/cospm_bode.csv "
                             "--freq-points 40");
    INFO(res.output);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("GM = 14.2") != std::string::npos);
    CHECK(res.output.find("PM = ") != std::string::npos);
    CHECK(res.output.find("|D(") != std::string::npos);
    std::ifstream csv("/tmp/cospm_bode.csv");
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 40);
}

TEST_CASE("cli: short simulation meets the residual requirement") {
    const std::string cfg = write_temp_config("[simulation]\nduration_s = 4\n", "shortsim.ini");
    const std::string out = "/tmp/cospm_sim_smoke.csv";
    const auto res = run_cli("simulate --deterministic --out " + out + " " + cfg);
    INFO(res.output);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("residual requirement (< 1e-4 rad): PASS") != std::string::npos);
    std::ifstream csv(out);
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4001);
}

TEST_CASE("cli: identical invocations give identical stdout and csv") {
    const std::string cfg = write_temp_config("[simulation]\nduration_s = 1\n", "detsim.ini");
    const auto a = run_cli("simulate --deterministic --out /tmp/cospm_det_a.csv " + cfg);
    const auto b = run_cli("simulate --deterministic --out /tmp/cospm_det_b.csv " + cfg);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    std::ifstream fa("/tmp/cospm_det_a.csv"), fb("/tmp/cospm_det_b.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
}
