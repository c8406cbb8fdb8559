// End-to-end checks of the command-line tool (runs the built binary).
#include "heun/common.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string tmp = std::string(HEUN_CLI_BINARY) + ".test_out";
    const std::string cmd = std::string(HEUN_CLI_BINARY) + " " + args + " > " + tmp + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(tmp, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(tmp.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

} // namespace

TEST_CASE("cli: dimension") {
    auto r = run_cli("dim --l 1,0,0,0");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.output);
    CHECK(j["command"] == "dim");
    CHECK(j["outputs"]["dimension"] == 3);
}

TEST_CASE("cli: qpoly for zero couplings") {
    auto r = run_cli("qpoly --l 0,0,0,0 --tau 0+1i");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.output);
    const auto coef = j["outputs"]["coefficients"];
    REQUIRE(coef.size() == 2);
    CHECK(std::abs(coef[0][0].get<double>()) < 1e-12);
    CHECK(std::abs(coef[1][0].get<double>() - 1.0) < 1e-12);
    const auto roots = j["outputs"]["roots"];
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0][0].get<double>()) < 1e-12);
}

TEST_CASE("cli: trigonometric Bethe state") {
    auto r = run_cli("trig-bethe --l0 1 --l1 0 --m 0");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.output);
    CHECK(j["outputs"]["c"].get<double>() == 3.0);
    REQUIRE(j["outputs"]["sigma"].size() == 2);
    CHECK(j["outputs"]["sigma"][0].get<double>() == 1.0);
    CHECK(j["outputs"]["sigma"][1].get<double>() == 0.5);
    CHECK(std::abs(j["outputs"]["T"][0][0].get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(j["outputs"]["E"].get<double>() - 9.0 * heun::pi * heun::pi) < 1e-8);
}

TEST_CASE("cli: determinism with a fixed seed") {
    const std::string cmd = "bethe --l 2,1,0,0 --tau 0+1i --energy 5+0.3i --seed 0";
    auto a = run_cli(cmd);
    auto b = run_cli(cmd);
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);

    auto c = run_cli("qpoly --l 1,1,1,1 --tau 0.3+0.8i --seed 7");
    auto d = run_cli("qpoly --l 1,1,1,1 --tau 0.3+0.8i --seed 7");
    REQUIRE(c.exit_code == 0);
    CHECK(c.output == d.output);
}

TEST_CASE("cli: exit codes and error objects") {
    CHECK(run_cli("qpoly --l 1,0,0,0").exit_code == 2);       // missing lattice
    CHECK(run_cli("nonsense").exit_code == 2);                // unknown subcommand
    auto r = run_cli("continue --l0 1 --l1 1 --m 0 --p 0.2"); // p out of range
    CHECK(r.exit_code == 1);
    auto j = json::parse(r.output);
    CHECK(j.contains("error"));
    CHECK(j["error"]["type"] == "DomainError");
}

TEST_CASE("cli: spectrum agreement") {
    auto r = run_cli("spectrum --l 1,1,0,0 --tau 0+1i");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.output);
    CHECK(j["outputs"]["degree"] == j["outputs"]["dimension"]);
    CHECK(j["outputs"]["max_abs_diff"].get<double>() < 1e-8);
}

TEST_CASE("cli: csv continuation") {
    auto r = run_cli("continue --l0 1 --l1 0 --m 0 --p 0.001 --steps 4 --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("p,E_re,E_im", 0) == 0);
    // one header plus at least steps+1 rows
    int lines = 0;
    for (char ch : r.output)
        if (ch == '\n') ++lines;
    CHECK(lines >= 5);
    // csv is only for path outputs
    CHECK(run_cli("dim --l 1,0,0,0 --format csv").exit_code == 1);
}

TEST_CASE("cli: verify runs a fast suite") {
    auto r = run_cli("verify --suite trig");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.output);
    CHECK(j["outputs"]["all_passed"] == true);
}
