#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgcascade/config.hpp"

namespace kgc {

std::string version();

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct OutputFile {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    enum class Status { Passed, ChecksFailed, ValidationFailure, NumericalFailure, IoFailure };

    std::map<std::string, std::string> config; // effective configuration (or the raw input on validation failure)
    std::string model;
    std::string version;
    double wall_clock_seconds = 0.0;
    std::uint64_t seed = 0;
    Status status = Status::Passed;
    std::string failure;
    std::vector<std::string> failure_items;
    std::vector<CheckResult> checks;
    std::vector<OutputFile> outputs;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    // Whether failed checks count as validation failures (check-regime) or numerical ones.
    bool checks_are_validation = false;

    // 0 all checks passed, 1 validation failure, 2 numerical failure.
    int exit_code() const;
    nlohmann::ordered_json to_json() const;
    bool check_passed(const std::string& name) const;
};

std::string status_name(RunManifest::Status s);

// Executes the selected pipeline, writes its outputs and manifest.json into cfg.out_dir.
RunManifest run(const ExperimentConfig& cfg);

// Validates the raw key-value configuration first; validation problems become a manifest
// (written to out_dir when it is known) instead of an exception.
RunManifest run_config(const std::map<std::string, std::string>& kv);

} // namespace kgc
