#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treeshift/parallel.hpp"

namespace treeshift {

// One configuration document drives a whole suite run.  Strict JSON: unknown
// keys are rejected, required keys are suite/tree/family/depth/seed.
struct SuiteConfig {
    std::string suite;   // display name, echoed into every output
    std::string tree;    // "path" | "two_ray"
    std::string family;  // "bergman" | "two_parameter"
    int a = 2;           // bergman exponent (a >= 2)
    double s = 0.0;      // two-parameter weights
    double t = 0.0;
    int depth = 0;  // truncation horizon N, 24..200
    int boundary_points = 1024;
    int sweep_points = 15;
    double max_radius = 0.9;
    std::uint64_t seed = 0;
    std::string out_dir;  // empty: in-memory only

    double tol_identification = 1e-9;
    double tol_gram = 1e-10;
    double tol_reproducing = 1e-8;
    double tol_vn = 1e-3;
    double tol_eigenvector = 1e-6;
    double tol_wot = 1e-3;
    double tol_recovery = 1e-8;

    static SuiteConfig from_json_text(const std::string& text);
    static SuiteConfig preset(const std::string& name);
    std::string to_json() const;  // normalized echo (sorted keys)
    void validate() const;        // throws std::invalid_argument
};

std::vector<std::string> suite_preset_names();

struct SuiteCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison;  // "<=", ">=", "==", "<"
};

struct SuiteResult {
    int exit_status = 1;  // 0 iff every hard assertion passed
    bool all_pass = false;
    std::vector<SuiteCheck> checks;
    // filename -> full file content; built entirely in memory so a failing
    // run can never leave partial files behind.
    std::map<std::string, std::string> files;
};

// Runs every check for the configured family and assembles the reports.
// Output bytes depend only on (config, seed), not on the execution policy.
SuiteResult run_suite(const SuiteConfig& config, Exec exec = Exec::serial);

// Writes result.files into out_dir (created if needed), whole files only.
void write_suite_files(const SuiteResult& result, const std::string& out_dir);

}  // namespace treeshift
