#include "kgcascade/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "kgcascade/bridge.hpp"
#include "kgcascade/errors.hpp"

namespace kgc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& v) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
}

long long to_int(const std::string& v) {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("expected true or false");
}

std::vector<int> to_int_list(const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(int(to_int(trim(part))));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

struct KeySpec {
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define KGC_DOUBLE(name, field)                                                    \
    KeySpec {                                                                     \
        name, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(v); }, \
            [](const ExperimentConfig& c) { return fmt(c.field); }                \
    }
#define KGC_INT(name, field)                                                       \
    KeySpec {                                                                     \
        name, [](ExperimentConfig& c, const std::string& v) { c.field = int(to_int(v)); }, \
            [](const ExperimentConfig& c) { return std::to_string(c.field); }     \
    }

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        {"model", [](ExperimentConfig& c, const std::string& v) { c.model = parse_model(v); },
         [](const ExperimentConfig& c) { return model_name(c.model); }},
        KGC_INT("grid.N", N),
        KGC_INT("grid.d", d),
        KGC_DOUBLE("params.beta", beta),
        KGC_INT("params.ell", ell),
        KGC_DOUBLE("regime.alpha", alpha),
        KGC_DOUBLE("regime.C0", C0),
        KGC_DOUBLE("regime.delta", delta),
        KGC_DOUBLE("regime.m", m),
        KGC_DOUBLE("regime.s", s),
        KGC_DOUBLE("regime.lambda", lambda),
        KGC_DOUBLE("regime.K", K),
        KGC_DOUBLE("regime.alpha_tilde", alpha_tilde),
        KGC_DOUBLE("regime.T0", T0),
        {"regime.k0", [](ExperimentConfig& c, const std::string& v) { c.k0 = to_int_list(v); },
         [](const ExperimentConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.k0.size(); ++i) s += (i ? "," : "") + std::to_string(c.k0[i]);
             return s;
         }},
        KGC_DOUBLE("integrator.dt", dt),
        KGC_DOUBLE("integrator.dtau", dtau),
        KGC_DOUBLE("integrator.horizon", horizon),
        KGC_INT("integrator.sync", sync),
        KGC_INT("nls.H", H),
        KGC_DOUBLE("nls.eps", eps),
        KGC_DOUBLE("nls.beta_eff", beta_eff),
        KGC_DOUBLE("nls.l2", l2),
        KGC_DOUBLE("nls.guard_tol", guard_tol),
        {"nls.detect_growth", [](ExperimentConfig& c, const std::string& v) { c.detect_growth = to_bool(v); },
         [](const ExperimentConfig& c) { return std::string(c.detect_growth ? "true" : "false"); }},
        KGC_DOUBLE("bridge.monitor_factor", monitor_factor),
        KGC_DOUBLE("cascade.factor", cascade_factor),
        KGC_INT("normal_form.box", nf_box),
        KGC_DOUBLE("checks.energy_tol", energy_tol),
        {"output.dir", [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; },
         [](const ExperimentConfig& c) { return c.out_dir; }},
        {"output.format",
         [](ExperimentConfig& c, const std::string& v) {
             if (v != "ndjson" && v != "csv") throw std::invalid_argument("expected ndjson or csv");
             c.format = v;
         },
         [](const ExperimentConfig& c) { return c.format; }},
        {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = std::uint64_t(std::stoull(v)); },
         [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
    };
    return specs;
}

#undef KGC_DOUBLE
#undef KGC_INT

} // namespace

std::string model_name(Model m) {
    switch (m) {
    case Model::Kg: return "kg";
    case Model::Nls: return "nls";
    case Model::Compare: return "compare";
    case Model::Cascade: return "cascade";
    case Model::NormalForm: return "normal-form";
    case Model::CheckRegime: return "check-regime";
    }
    return "kg";
}

Model parse_model(const std::string& s) {
    if (s == "kg" || s == "simulate-kg") return Model::Kg;
    if (s == "nls" || s == "simulate-nls") return Model::Nls;
    if (s == "compare") return Model::Compare;
    if (s == "cascade") return Model::Cascade;
    if (s == "normal-form") return Model::NormalForm;
    if (s == "check-regime") return Model::CheckRegime;
    throw ParameterError("unknown model '" + s + "'");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> problems;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            problems.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (!kv.emplace(key, value).second)
            problems.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    if (!problems.empty()) throw ConfigError("malformed configuration", problems);
    return kv;
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open configuration file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

std::vector<std::string> required_keys(Model m) {
    switch (m) {
    case Model::Kg:
        return {"grid.N", "grid.d", "params.beta", "params.ell", "regime.alpha", "regime.C0", "integrator.horizon"};
    case Model::Nls:
        return {"grid.d", "params.ell", "nls.H", "nls.eps", "nls.beta_eff", "nls.l2", "integrator.horizon"};
    case Model::Compare:
    case Model::Cascade:
        return {"grid.N", "grid.d", "params.beta", "params.ell", "regime.alpha", "regime.C0", "regime.delta",
                "regime.m", "regime.lambda", "nls.H", "integrator.horizon"};
    case Model::NormalForm:
        return {"grid.N", "grid.d", "params.beta", "params.ell", "regime.alpha"};
    case Model::CheckRegime:
        return {"grid.N", "grid.d", "params.ell", "regime.alpha", "regime.delta", "regime.m", "regime.lambda"};
    }
    return {};
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    std::vector<std::string> problems;
    std::map<std::string, const KeySpec*> index;
    for (const auto& k : key_specs()) index[k.key] = &k;

    if (!kv.count("model")) problems.push_back("missing field 'model'");
    for (const auto& [key, value] : kv) {
        const auto it = index.find(key);
        if (it == index.end()) {
            problems.push_back("unknown field '" + key + "'");
            continue;
        }
        try {
            it->second->set(c, value);
        } catch (const std::exception& e) {
            problems.push_back("field '" + key + "': cannot parse '" + value + "' (" + e.what() + ")");
        }
    }
    if (kv.count("model") && problems.empty())
        for (const auto& k : required_keys(c.model))
            if (!kv.count(k)) problems.push_back("missing field '" + k + "'");
    if (!problems.empty()) throw ConfigError("invalid configuration", problems);

    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    need(c.N >= 1, "grid.N must be >= 1");
    need(c.d >= 1 && c.d <= 3, "grid.d must be 1, 2 or 3");
    need(c.ell >= 1, "params.ell must be >= 1");
    need(c.beta >= 0.0 && std::isfinite(c.beta), "params.beta must be finite and >= 0");
    need(c.alpha > 0.0, "regime.alpha must be > 0");
    need(c.C0 >= 0.0, "regime.C0 must be >= 0");
    need(c.delta > 0.0 && c.delta < 1.0, "regime.delta must lie in (0, 1)");
    need(c.m > 0.0, "regime.m must be > 0");
    need(c.s >= 0.0, "regime.s must be >= 0");
    need(c.lambda > 0.0, "regime.lambda must be > 0");
    need(c.K >= 0.0, "regime.K must be >= 0 (0 selects the frozen value)");
    need(c.alpha_tilde >= 0.0, "regime.alpha_tilde must be >= 0");
    need(c.T0 > 0.0, "regime.T0 must be > 0");
    need(int(c.k0.size()) == c.d, "regime.k0 must have grid.d components");
    need(c.dt >= 0.0, "integrator.dt must be >= 0 (0 selects the default)");
    need(c.dtau >= 0.0, "integrator.dtau must be >= 0 (0 selects the default)");
    need(c.sync >= 1, "integrator.sync must be >= 1");
    need(c.H >= 1, "nls.H must be >= 1");
    need(c.guard_tol > 0.0, "nls.guard_tol must be > 0");
    need(c.monitor_factor > 1.0, "bridge.monitor_factor must be > 1");
    need(c.cascade_factor > 1.0, "cascade.factor must be > 1");
    need(c.nf_box >= 1, "normal_form.box must be >= 1");
    need(c.energy_tol > 0.0, "checks.energy_tol must be > 0");
    const bool timed = c.model == Model::Kg || c.model == Model::Nls || c.model == Model::Compare ||
                       c.model == Model::Cascade;
    if (timed) need(c.horizon > 0.0, "integrator.horizon must be > 0");
    if (c.model == Model::Nls) need(c.eps > 0.0, "nls.eps must be > 0");
    if (c.model != Model::Nls && c.N >= 1) {
        // Horizon guard: t <= T0 mu^{-2}.
        const double mu = 2.0 / (2.0 * c.N + 1.0);
        if (timed)
            need(c.horizon <= c.T0 / (mu * mu),
                 "integrator.horizon " + fmt(c.horizon) + " exceeds the ceiling T0 mu^-2 = " + fmt(c.T0 / (mu * mu)));
    }
    if (!problems.empty()) throw ConfigError("invalid configuration", problems);
    return c;
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
    std::map<std::string, std::string> kv;
    for (const auto& k : key_specs()) kv[k.key] = k.get(*this);
    return kv;
}

std::string ExperimentConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : to_map()) out += k + " = " + v + "\n";
    return out;
}

std::map<std::string, std::string> cascade_preset() {
    const int N = 64;
    const double mu = 2.0 / (2.0 * N + 1.0);
    const double m = 3.0, lambda = 0.1, delta = 0.9;
    RegimeParams r = RegimeParams::make(1, 1, 1.0, 0.75, mu, delta, m, 1.0, lambda);
    const RegimeReport rep = regime_check(r);
    const double alpha = 0.5 * (rep.alpha0 + rep.alpha1);
    r = RegimeParams::make(1, 1, 1.0, alpha, mu, delta, m, 1.0, lambda);
    return {
        {"model", "cascade"},
        {"grid.N", std::to_string(N)},
        {"grid.d", "1"},
        {"params.beta", "1"},
        {"params.ell", "1"},
        {"regime.alpha", fmt(alpha)},
        {"regime.C0", "1"},
        {"regime.delta", fmt(delta)},
        {"regime.m", fmt(m)},
        {"regime.lambda", fmt(lambda)},
        {"regime.k0", "1"},
        {"nls.H", "32"},
        {"integrator.horizon", fmt(r.validity_horizon(1.0))},
        {"integrator.sync", "20"},
        {"integrator.dt", "0.01"},
        {"integrator.dtau", "0.001"},
    };
}

} // namespace kgc
