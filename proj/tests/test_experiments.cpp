#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nearcrit/errors.hpp"
#include "nearcrit/experiments.hpp"

using namespace nearcrit;

namespace {

// Small grids so every suite runs in well under a second.
Json tiny(const std::string& name) {
    if (name == "arm-exponents") return {{"ns", {4, 8}}, {"samples", 300}};
    if (name == "kesten-relation") return {{"ps", {0.75, 0.85}}, {"L_budget", 40000}, {"arm_samples", 300}};
    if (name == "net-probability") return {{"n", 12.0}, {"kappas", {3, 4, 6}}, {"samples", 100}};
    if (name == "hole-crossing") return {{"ms", {16}}, {"n1s", {4, 8}}, {"samples", 200}};
    if (name == "four-arm-stability") return {{"ms", {8, 12}}, {"samples", 40}, {"pi4_samples", 200}};
    if (name == "one-arm-stability" || name == "vacant-arm-nonstability")
        return {{"ms", {8, 16}}, {"samples", 200}, {"plain_samples", 200}};
    if (name == "crossing-stability") return {{"ms", {8, 12}}, {"samples", 100}};
    if (name == "stretched-exp-decay") return {{"m", 8.0}, {"n_over_m", {0.25, 0.5, 1}}, {"samples", 100}};
    if (name == "largest-cluster-concentration") return {{"ms", {8, 12}}, {"runs", 10}, {"theta_samples", 100}};
    if (name == "rho-pi-measurement") return {{"zeta", 0.01}, {"m", 8.0}, {"runs", 3}};
    if (name == "exceptional-scale-burning") return {{"zetas", {0.04, 0.02}}, {"runs", 20}};
    if (name == "frozen-boundary-alternative") return {{"n", 16.0}, {"runs", 5}, {"Ns", {3, 5}}, {"frozen_n", 20.0}};
    return Json::object();
}

}  // namespace

TEST_CASE("registry") {
    CHECK(experiment_names().size() == 13);
    CHECK_THROWS_AS(run_experiment({"no-such-suite"}), InvalidArgument);
    ExperimentConfig c{"hole-crossing"};
    c.params = {{"bogus", 1}};
    CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
    c.params = {{"samples", "many"}};
    CHECK_THROWS_AS(run_experiment(c), InvalidArgument);
}

TEST_CASE("every suite runs on a tiny grid and is deterministic") {
    for (const auto& name : experiment_names()) {
        CAPTURE(name);
        ExperimentConfig c{name, tiny(name), 5};
        const auto a = run_experiment(c);
        const auto b = run_experiment(c);
        CHECK(!a.rows.empty());
        CHECK(a.rows == b.rows);
        CHECK(a.config_hash == b.config_hash);
        CHECK(a.config_hash.size() == 40);
        for (const auto& row : a.rows) CHECK(row.size() == a.columns.size());
        c.seed = 6;
        CHECK(run_experiment(c).config_hash != a.config_hash);
    }
}

TEST_CASE("thread count does not change results") {
    ExperimentConfig c{"hole-crossing", tiny("hole-crossing"), 3};
    const auto a = run_experiment(c);
    c.threads = 3;
    CHECK(run_experiment(c).rows == a.rows);
}

TEST_CASE("outputs carry the config hash and seed") {
    const auto dir = std::filesystem::temp_directory_path() / "nearcrit_exp_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c{"frozen-boundary-alternative", tiny("frozen-boundary-alternative"), 9, dir.string()};
    const auto r = run_experiment(c);
    REQUIRE(r.files.size() == 2);
    std::ifstream csv(r.files[0]);
    std::stringstream ss;
    ss << csv.rdbuf();
    CHECK(ss.str().find("# config_hash: " + r.config_hash) != std::string::npos);
    CHECK(ss.str().find("# seed: 9") != std::string::npos);
    std::ifstream js(r.files[1]);
    const auto j = Json::parse(js);
    CHECK(j["config_hash"] == r.config_hash);
    CHECK(j["passed"] == r.passed());
    std::filesystem::remove_all(dir);
}

TEST_CASE("budget flags partial results") {
    ExperimentConfig c{"hole-crossing", {{"ms", {16, 32}}, {"n1s", {4, 8, 16}}, {"samples", 500}}, 1};
    c.budget_seconds = 1e-9;
    const auto r = run_experiment(c);
    CHECK(r.partial);
    CHECK(r.rows.size() < 6);
    CHECK_FALSE(r.passed());
    CHECK(r.summary()["partial"] == true);
}

TEST_CASE("oracle suite holds on a small grid") {
    ExperimentConfig c{"hole-crossing", {{"ms", {16}}, {"n1s", {4, 8}}, {"samples", 2000}}, 2};
    const auto r = run_experiment(c);
    CHECK(r.passed());
}
