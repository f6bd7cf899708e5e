#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "kgcascade/config.hpp"
#include "kgcascade/errors.hpp"
#include "kgcascade/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Klein-Gordon lattice / small-dispersion NLS experiment runner"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the verb
    std::string config_path, out_dir, seed;
    bool quiet = false;
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--out-dir", out_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", seed, "RNG seed (overrides seed)");
    app.add_flag("--quiet", quiet, "print nothing on success");
    for (const char* verb : {"simulate-kg", "simulate-nls", "compare", "cascade", "normal-form", "check-regime"})
        app.add_subcommand(verb, std::string("run the ") + verb + " pipeline");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    if (const char* env = std::getenv("KGCASCADE_CONFIG"); env && *env) config_path = env;

    std::map<std::string, std::string> kv;
    const kgc::Model model = kgc::parse_model(verb);
    try {
        if (model == kgc::Model::Cascade) kv = kgc::cascade_preset();
        if (!config_path.empty())
            for (const auto& [k, v] : kgc::read_key_values(config_path)) kv[k] = v;
        if (kv.count("model") && kgc::parse_model(kv["model"]) != model) {
            std::cerr << "error: configuration model '" << kv["model"] << "' does not match verb '" << verb << "'\n";
            return 1;
        }
    } catch (const kgc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        for (const auto& i : e.items()) std::cerr << "  - " << i << '\n';
        return 1;
    } catch (const kgc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    kv["model"] = kgc::model_name(model);
    if (!out_dir.empty()) kv["output.dir"] = out_dir;
    if (!seed.empty()) kv["seed"] = seed;

    const kgc::RunManifest man = kgc::run_config(kv);
    const bool show = !quiet || man.exit_code() != 0;
    if (show) {
        std::ostream& os = man.exit_code() == 0 ? std::cout : std::cerr;
        os << verb << ": " << kgc::status_name(man.status) << '\n';
        if (!man.failure.empty()) os << "  " << man.failure << '\n';
        for (const auto& i : man.failure_items) os << "  - " << i << '\n';
        for (const auto& c : man.checks)
            os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << " value=" << c.value
               << " threshold=" << c.threshold << '\n';
    }
    return man.exit_code();
}
