#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kgc {

enum class Model { Kg, Nls, Compare, Cascade, NormalForm, CheckRegime };

std::string model_name(Model m);
// Accepts the model names and the CLI verbs (simulate-kg, simulate-nls, ...).
Model parse_model(const std::string& s);

// Flat "key = value" text; '#' starts a comment. Duplicate keys and malformed
// lines are reported together as a ConfigError.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::string& path);

struct ExperimentConfig {
    Model model = Model::Kg;

    // grid
    int N = 64;
    int d = 1;
    // params
    double beta = 1.0;
    int ell = 1;
    // regime
    double alpha = 0.75;
    double C0 = 1.0;
    double delta = 0.9;
    double m = 3.0;
    double s = 1.0;
    double lambda = 0.1;
    double K = 0.0; // 0 -> frozen calibrated value for (d, ell, m)
    double alpha_tilde = 0.0; // 0 -> 1/(16 ell)
    double T0 = 1.0;
    std::vector<int> k0{1};
    // integrator
    double dt = 0.0;   // 0 -> solver default
    double dtau = 0.0; // 0 -> solver default
    double horizon = 0.0; // original time t (kg, compare, cascade) or tau (nls)
    int sync = 5;
    // nls
    int H = 32;
    double eps = 0.0;
    double beta_eff = 1.0;
    double l2 = 1.0;
    double guard_tol = 1e-10;
    bool detect_growth = false;
    // bridge
    double monitor_factor = 100.0;
    // cascade
    double cascade_factor = 4.0;
    // normal form
    int nf_box = 2;
    // checks
    double energy_tol = 1e-6;
    // output
    std::string out_dir = ".";
    std::string format = "ndjson";
    std::uint64_t seed = 0;

    // Validates and converts; every problem is collected into one ConfigError.
    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
    // Effective configuration, complete enough to re-run without the source file.
    std::map<std::string, std::string> to_map() const;
    std::string to_text() const;
};

// d=1, ell=1, N=64, m=3, delta=0.9, alpha at the middle of (alpha0, alpha1), C0=1,
// horizon at the end of the approximation window.
std::map<std::string, std::string> cascade_preset();

// The keys each model requires; missing ones are listed by from_map.
std::vector<std::string> required_keys(Model m);

} // namespace kgc
