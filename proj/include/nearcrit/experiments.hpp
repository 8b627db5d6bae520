#pragma once
// Named experiment suites: parameter grid, statistic, oracle or trend assertion, CSV and summary JSON.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "nearcrit/io.hpp"

namespace nearcrit {

struct ExperimentConfig {
    std::string name;
    Json params = Json::object();  // suite parameters; unknown keys are rejected
    std::uint64_t seed = 1;
    std::string out;               // directory for <name>.csv and <name>.summary.json; empty = no files
    double budget_seconds = 0;     // 0 = unlimited; when exceeded the remaining grid points are skipped
    int threads = 1;
};

struct Assertion {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    std::uint64_t seed = 0;
    Json params;                    // effective parameters, defaults filled in
    std::string config_hash;        // content_hash of {name, params, seed}
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
    Json stats = Json::object();    // fits and derived numbers
    std::vector<Assertion> assertions;
    bool partial = false;
    double elapsed = 0;
    std::vector<std::string> files;

    bool passed() const;
    Json summary() const;
};

const std::vector<std::string>& experiment_names();
// Defaults of a suite as a parameter object.
Json experiment_defaults(const std::string& name);

ExperimentResult run_experiment(const ExperimentConfig& cfg);
void write_experiment_csv(std::ostream& os, const ExperimentResult& r);

}  // namespace nearcrit
