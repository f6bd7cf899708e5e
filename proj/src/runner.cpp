#include "kgcascade/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "kgcascade/bridge.hpp"
#include "kgcascade/errors.hpp"
#include "kgcascade/io.hpp"
#include "kgcascade/lattice.hpp"
#include "kgcascade/nls.hpp"
#include "kgcascade/normal_form.hpp"
#include "kgcascade/spectral.hpp"

#ifndef KGCASCADE_VERSION
#define KGCASCADE_VERSION "0.0.0"
#endif

namespace kgc {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Everything a pipeline needs to record results.
struct Ctx {
    const ExperimentConfig& cfg;
    RunManifest& man;

    std::string path(const std::string& stem) const {
        return (fs::path(cfg.out_dir) / (stem + (cfg.format == "csv" ? ".csv" : ".ndjson"))).string();
    }
    void emit(const std::string& stem, const Series& s) const {
        const std::string p = path(stem);
        emit_spectrum_series(p, s, cfg.format);
        man.outputs.push_back({p, sha256_file(p)});
    }
    void emit_text(const std::string& name, const std::string& text) const {
        const std::string p = (fs::path(cfg.out_dir) / name).string();
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(p, "cannot open for writing");
        out << text;
        out.flush();
        if (!out) throw IoError(p, "write failed");
        man.outputs.push_back({p, sha256_file(p)});
    }
    void check(const std::string& name, bool pass, double value, double threshold, std::string detail = {}) const {
        man.checks.push_back({name, pass, value, threshold, std::move(detail)});
    }
};

json regime_json(const RegimeReport& rep) {
    json items = json::array();
    for (const auto& i : rep.items)
        items.push_back({{"name", i.name}, {"pass", i.pass}, {"value", i.value}, {"lower", i.lower}, {"upper", i.upper}});
    return {{"alpha0", rep.alpha0}, {"alpha1", rep.alpha1}, {"delta0", rep.delta0}, {"all_pass", rep.all_pass()},
            {"items", items}};
}

RegimeParams regime_of(const ExperimentConfig& c) {
    const double mu = 2.0 / (2.0 * c.N + 1.0);
    return RegimeParams::make(c.d, c.ell, c.beta, c.alpha, mu, c.delta, c.m, c.s, c.lambda,
                              c.alpha_tilde > 0.0 ? c.alpha_tilde : -1.0);
}

std::vector<std::string> k_columns(const std::string& prefix, int d) {
    std::vector<std::string> out;
    for (int i = 1; i <= d; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

Series specific_series(const SpecificSpectrum& ss) {
    Series s;
    s.columns = k_columns("k", ss.d);
    for (const auto& c : k_columns("kappa", ss.d)) s.columns.push_back(c);
    for (const char* c : {"omega", "E_k", "E_kappa"}) s.columns.push_back(c);
    for (const auto& e : ss.entries) {
        std::vector<double> row;
        for (int v : e.k) row.push_back(v);
        for (double v : e.kappa) row.push_back(v);
        row.push_back(e.omega);
        row.push_back(e.E_k);
        row.push_back(e.E_kappa);
        s.rows.push_back(std::move(row));
    }
    return s;
}

// |Q_k|^2 + |P_k|^2/omega_k^2 per mode.
std::vector<double> mode_actions(const LatticeState& s, const LatticeGrid& grid) {
    const ModeSpectrum spec = dft_modes(s, grid);
    std::vector<double> a(grid.Nd);
    for (std::size_t i = 0; i < grid.Nd; ++i)
        a[i] = std::norm(spec.Qhat[i]) + std::norm(spec.Phat[i]) / (spec.omega[i] * spec.omega[i]);
    return a;
}

void run_kg(const Ctx& x) {
    const auto& c = x.cfg;
    const LatticeGrid grid = LatticeGrid::make(c.N, c.d);
    const KGParams params{c.beta, c.ell};
    KGIntegrator integ(grid, params);
    LatticeState s = make_single_mode_datum(c.k0, c.C0, c.alpha, grid, params);
    const double dt_req = c.dt > 0.0 ? c.dt : default_dt(grid);
    const auto n = std::size_t(std::ceil(c.horizon / dt_req - 1e-9));
    const double dt = c.horizon / double(n);
    const double H0 = hamiltonian_energy(s, params, grid);
    const bool linear = c.beta == 0.0;
    const std::vector<double> I0 = linear ? mode_actions(s, grid) : std::vector<double>{};
    const double Imax = I0.empty() ? 0.0 : std::max(1e-300, *std::max_element(I0.begin(), I0.end()));
    double amp = 0.0;
    for (double q : s.Q) amp = std::max(amp, std::abs(q));

    Series series{{"t", "energy", "energy_drift"}, {}};
    if (linear) series.columns.push_back("action_defect");
    double worst_drift = 0.0, worst_action = 0.0, worst_odd = 0.0;
    auto sample = [&]() {
        const double E = hamiltonian_energy(s, params, grid);
        const double drift = H0 != 0.0 ? std::abs(E - H0) / std::abs(H0) : std::abs(E - H0);
        worst_drift = std::max(worst_drift, drift);
        worst_odd = std::max(worst_odd, odd_symmetry_defect(s, grid));
        std::vector<double> row{s.t, E, drift};
        if (linear) {
            const auto I = mode_actions(s, grid);
            double dev = 0.0;
            for (std::size_t i = 0; i < I.size(); ++i) dev = std::max(dev, std::abs(I[i] - I0[i]));
            worst_action = std::max(worst_action, dev / Imax);
            row.push_back(dev / Imax);
        }
        series.rows.push_back(std::move(row));
    };
    sample();
    const std::size_t samples = std::size_t(c.sync);
    std::size_t done = 0;
    for (std::size_t k = 1; k <= samples; ++k) {
        const std::size_t target = n * k / samples;
        if (target > done) integ.advance(s, dt, target - done);
        done = target;
        s.t = c.horizon * double(target) / double(n);
        sample();
    }
    x.emit("kg_series", series);
    x.emit("kg_spectrum", specific_series(specific_spectrum(dft_modes(s, grid), grid)));

    x.man.results["steps"] = n;
    x.man.results["dt"] = dt;
    x.man.results["cfl_warning"] = cfl_warning(dt, grid);
    x.man.results["initial_energy"] = H0;
    x.man.results["max_energy_drift"] = worst_drift;
    x.check("energy_conservation", worst_drift <= c.energy_tol, worst_drift, c.energy_tol);
    if (linear) x.check("mode_action_conservation", worst_action <= 1e-12, worst_action, 1e-12);
    const double odd_tol = 1e-12 * std::max(1.0, amp);
    x.check("odd_symmetry", worst_odd <= odd_tol, worst_odd, odd_tol);
}

json certificate_json(const GrowthCertificate& g) {
    json j{{"status", g.status == GrowthCertificate::Status::Hit ? "hit" : "timeout"},
           {"m", g.m},
           {"lambda", g.lambda},
           {"K", g.K},
           {"eps", g.eps},
           {"r0", g.r0},
           {"l2", g.l2},
           {"threshold", g.threshold},
           {"t_hit", g.t_hit},
           {"bound_T", g.bound_T},
           {"max_norm", g.max_norm}};
    j["t1"] = g.t1 ? json(*g.t1) : json(nullptr);
    return j;
}

void run_nls(const Ctx& x) {
    const auto& c = x.cfg;
    const NLSParams params{c.eps, c.ell, c.beta_eff};
    params.validate();
    NLSSolver solver(c.H, c.d, params, c.guard_tol);
    const NLSState s0 = nls_single_mode(c.H, c.k0, c.l2);
    NLSState s = s0;
    const double dtau_req = c.dtau > 0.0 ? c.dtau : solver.default_dtau(s);
    const auto n = std::size_t(std::ceil(c.horizon / dtau_req - 1e-9));
    const double dtau = c.horizon / double(n);
    const double l20 = l2_norm(s);
    const double H0 = solver.hamiltonian(s);

    Series series{{"tau", "l2", "hamiltonian", "h_m"}, {}};
    double worst_step = 0.0, worst_drift = 0.0;
    auto sample = [&]() {
        const double E = solver.hamiltonian(s);
        worst_drift = std::max(worst_drift, std::abs(E - H0) / std::max(std::abs(H0), 1e-300));
        series.rows.push_back({s.tau, l2_norm(s), E, sobolev_norm(s, c.m)});
    };
    sample();
    const std::size_t samples = std::size_t(c.sync);
    std::size_t done = 0;
    double prev = l20;
    for (std::size_t k = 1; k <= samples; ++k) {
        const std::size_t target = n * k / samples;
        for (; done < target; ++done) {
            solver.advance(s, dtau, 1);
            const double l2 = l2_norm(s);
            worst_step = std::max(worst_step, std::abs(l2 - prev) / std::max(l20, 1e-300));
            prev = l2;
        }
        s.tau = c.horizon * double(target) / double(n);
        sample();
    }
    x.emit("nls_series", series);
    x.man.results["steps"] = n;
    x.man.results["dtau"] = dtau;
    x.man.results["initial_hamiltonian"] = H0;
    x.check("l2_per_step", worst_step <= 1e-12, worst_step, 1e-12);
    x.check("hamiltonian_conservation", worst_drift <= c.energy_tol, worst_drift, c.energy_tol);

    if (c.detect_growth) {
        const double K = c.K > 0.0 ? c.K : frozen_kuksin_K(c.d, c.ell, c.m);
        Series gs{{"tau", "l2", "h_m", "in_A"}, {}};
        const std::size_t every = std::max<std::size_t>(1, n / 1000);
        const GrowthCertificate g = detect_growth(
            s0, params, c.m, c.lambda, K, c.horizon, dtau,
            [&](const GrowthSample& q) { gs.rows.push_back({q.tau, q.l2, q.hm, q.in_A ? 1.0 : 0.0}); }, every,
            c.guard_tol);
        x.emit("nls_growth", gs);
        x.man.results["growth"] = certificate_json(g);
        const bool hit = g.status == GrowthCertificate::Status::Hit;
        x.check("kuksin_entry", hit && g.t_hit <= g.bound_T, hit ? g.t_hit : g.max_norm, g.bound_T,
                hit ? "entered A" : "timeout; value is the largest H^m norm reached");
        x.check("norm_doubling", bool(g.t1), g.t1 ? *g.t1 : g.max_norm, 2.0 * g.r0);
    }
}

void run_coevolve(const Ctx& x, bool cascade) {
    const auto& c = x.cfg;
    const RegimeParams r = regime_of(c);
    const RegimeReport rep = regime_check(r);
    x.man.results["regime"] = regime_json(rep); // report only

    CoevolveConfig cc;
    cc.N = c.N;
    cc.regime = r;
    cc.C0 = c.C0;
    cc.k0 = c.k0;
    cc.H_nls = c.H;
    cc.tau_end = r.tau_of_t(c.horizon);
    cc.n_sync = c.sync;
    cc.dt = c.dt;
    cc.dtau = c.dtau > 0.0 ? c.dtau : 1e-3;
    cc.monitor_factor = c.monitor_factor;
    cc.guard_tol = c.guard_tol;
    cc.T0 = c.T0;

    Series series{{"t", "sup_error", "low_mode_error_max", "high_mode_mass", "cascade_metric", "tau",
                   "cascade_metric_all", "energy_drift", "nls_l1s_ratio"},
                  {}};
    std::vector<SyncRecord> recs;
    try {
        recs = coevolve(cc, [&](const SyncRecord& q) {
            series.rows.push_back({q.t, q.sup_error, q.low_mode_error_max, q.high_mode_mass, q.cascade_metric, q.tau,
                                   q.cascade_metric_all, q.energy_drift, q.nls_l1s_ratio});
        });
    } catch (const NumericalError&) {
        x.emit(cascade ? "cascade_series" : "compare_series", series);
        throw;
    }
    x.emit(cascade ? "cascade_series" : "compare_series", series);

    double drift = 0.0;
    bool inside = true;
    for (const auto& q : recs) {
        drift = std::max(drift, q.energy_drift);
        inside = inside && !q.beyond_horizon;
    }
    x.man.results["validity_horizon"] = r.validity_horizon(c.T0);
    x.man.results["tau_end"] = cc.tau_end;
    x.man.results["eps_derived"] = r.eps_derived;
    x.man.results["low_cutoff"] = r.low_cutoff();
    x.check("energy_conservation", drift <= c.energy_tol, drift, c.energy_tol);
    x.check("within_horizon", inside, c.horizon, r.validity_horizon(c.T0));
    if (!cascade) return;

    const double m0 = recs.front().cascade_metric;
    const double m1 = recs.back().cascade_metric;
    const double ratio = m0 > 0.0 ? m1 / m0 : std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::size_t i = 1; i < recs.size(); ++i) monotone = monotone && recs[i].cascade_metric > recs[i - 1].cascade_metric;
    json first = nullptr;
    for (const auto& q : recs)
        if (q.cascade_metric >= c.cascade_factor * m0) {
            first = q.t;
            break;
        }
    const double a0 = recs.front().cascade_metric_all;
    x.man.results["cascade_metric_initial"] = m0;
    x.man.results["cascade_metric_final"] = m1;
    x.man.results["cascade_growth_ratio"] = ratio;
    x.man.results["first_time_above_factor"] = first;
    x.man.results["uncut_metric_growth_ratio"] = a0 > 0.0 ? recs.back().cascade_metric_all / a0 : 0.0;
    x.check("cascade_growth", ratio >= c.cascade_factor, ratio, c.cascade_factor);
    x.check("cascade_monotone", monotone, ratio, 1.0, "strict increase between consecutive sync points");
}

// Random zero-momentum polynomial in d = 1 with coefficients in {-3..3} + i{-3..3}.
nf::Polynomial random_poly(std::mt19937_64& rng, int box, int max_deg, int terms) {
    nf::Polynomial p(1);
    std::uniform_int_distribution<int> deg(2, max_deg), idx(-box, box), sg(0, 1), co(-3, 3);
    for (int t = 0; t < terms; ++t) {
        const int k = deg(rng);
        nf::Monomial mono;
        int mom = 0;
        for (int i = 0; i + 1 < k; ++i) {
            const nf::Var v = sg(rng) ? nf::xi({idx(rng)}) : nf::eta({idx(rng)});
            mom += v.a[0] * v.sigma;
            mono.push_back(v);
        }
        // Close the momentum with the last factor when it fits in the box.
        const int sigma = sg(rng) ? 1 : -1;
        const int a = -mom * sigma;
        if (std::abs(a) > box) continue;
        mono.push_back(sigma > 0 ? nf::xi({a}) : nf::eta({a}));
        const cplx cf(co(rng), co(rng));
        if (cf != 0.0) p.add(mono, cf);
    }
    return p;
}

void run_normal_form(const Ctx& x) {
    const auto& c = x.cfg;
    const double mu = 2.0 / (2.0 * c.N + 1.0);
    const nf::KgNlsCoefficients k = nf::kg_nls_coefficients(c.ell, c.alpha, mu, c.beta, c.nf_box, c.d);
    std::ostringstream avg, full;
    nf::write_polynomial(avg, k.avg_count);
    nf::write_polynomial(full, k.avg_quad);
    x.emit_text("normal_form_avg_count.poly", avg.str());
    x.emit_text("normal_form_avg_quad.poly", full.str());

    const double expected = c.beta * nf::binomial(2 * c.ell + 2, c.ell + 1) / std::ldexp(1.0, c.ell + 2);
    x.man.results["nonlinear"] = k.nonlinear;
    x.man.results["nonlinear_expected"] = expected;
    x.man.results["prefactor"] = k.prefactor;
    x.man.results["avg_count_terms"] = k.avg_count.size();
    double worst = 0.0;
    for (const auto& [hv, w] : k.dispersive) {
        double n2 = 0.0;
        for (int v : hv) n2 += double(v) * v;
        worst = std::max(worst, std::abs(w - 0.5 * n2));
    }
    x.check("nonlinear_coefficient", k.nonlinear == expected, k.nonlinear, expected, "exact equality");
    x.check("dispersive_weight", worst == 0.0, worst, 0.0, "exact |h|^2/2");
    x.check("resonance", k.resonance_ok, k.resonance_ok ? 1.0 : 0.0, 1.0);

    // Seeded algebra self-check.
    std::mt19937_64 rng(c.seed);
    int bad = 0;
    for (int i = 0; i < 20; ++i) {
        const nf::Polynomial F = random_poly(rng, 3, 4, 6), G = random_poly(rng, 3, 4, 6);
        if (!(nf::poisson_bracket(F, G) + nf::poisson_bracket(G, F)).empty()) ++bad;
        const auto sol = nf::homological_solution(F);
        if (!(nf::poisson_bracket(sol.chi, nf::h0(3, 1)) + F - sol.Z).empty()) ++bad;
    }
    x.check("bracket_and_homological_identities", bad == 0, bad, 0.0, "20 seeded random pairs");
}

void run_check_regime(const Ctx& x) {
    const RegimeParams r = regime_of(x.cfg);
    const RegimeReport rep = regime_check(r);
    x.man.checks_are_validation = true;
    for (const auto& i : rep.items)
        x.check(i.name, i.pass, i.value, i.name == "nu_window" ? i.upper : (i.pass ? i.upper : i.lower),
                "open interval (" + format_double(i.lower) + ", " + format_double(i.upper) + ")");
    x.man.results["regime"] = regime_json(rep);
    json branches = json::array();
    for (double b : alpha0_branches(r.m, r.d, r.ell, r.lambda)) branches.push_back(b);
    x.man.results["alpha0_branches"] = branches;
    x.man.results["eps_derived"] = r.eps_derived;
    x.man.results["validity_horizon"] = r.validity_horizon(x.cfg.T0);
    x.man.results["lambda_cap_normalized"] = lambda_cap_normalized(r.m, r.ell);
}

void write_manifest(const RunManifest& man, const std::string& dir) {
    const std::string p = (fs::path(dir) / "manifest.json").string();
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(p, "cannot open for writing");
    out << man.to_json().dump(2) << '\n';
}

} // namespace

std::string version() { return KGCASCADE_VERSION; }

std::string status_name(RunManifest::Status s) {
    switch (s) {
    case RunManifest::Status::Passed: return "passed";
    case RunManifest::Status::ChecksFailed: return "checks_failed";
    case RunManifest::Status::ValidationFailure: return "validation_failure";
    case RunManifest::Status::NumericalFailure: return "numerical_failure";
    case RunManifest::Status::IoFailure: return "io_failure";
    }
    return "unknown";
}

int RunManifest::exit_code() const {
    switch (status) {
    case Status::Passed: return 0;
    case Status::ValidationFailure:
    case Status::IoFailure: return 1;
    case Status::NumericalFailure: return 2;
    case Status::ChecksFailed: return checks_are_validation ? 1 : 2;
    }
    return 2;
}

bool RunManifest::check_passed(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c.pass;
    return false;
}

nlohmann::ordered_json RunManifest::to_json() const {
    json j;
    j["model"] = model;
    j["version"] = version;
    j["status"] = status_name(status);
    j["exit_code"] = exit_code();
    j["seed"] = seed;
    j["wall_clock_seconds"] = wall_clock_seconds;
    json cfg = json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    json cs = json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value},
                      {"threshold", c.threshold}, {"detail", c.detail}});
    j["checks"] = cs;
    json os = json::array();
    for (const auto& o : outputs) os.push_back({{"path", o.path}, {"sha256", o.sha256}});
    j["outputs"] = os;
    j["results"] = results;
    if (!failure.empty()) {
        j["failure"] = failure;
        j["failure_items"] = failure_items;
    }
    return j;
}

RunManifest run(const ExperimentConfig& cfg) {
    RunManifest man;
    man.config = cfg.to_map();
    man.model = model_name(cfg.model);
    man.version = version();
    man.seed = cfg.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        fs::create_directories(cfg.out_dir);
        const Ctx x{cfg, man};
        switch (cfg.model) {
        case Model::Kg: run_kg(x); break;
        case Model::Nls: run_nls(x); break;
        case Model::Compare: run_coevolve(x, false); break;
        case Model::Cascade: run_coevolve(x, true); break;
        case Model::NormalForm: run_normal_form(x); break;
        case Model::CheckRegime: run_check_regime(x); break;
        }
        const bool ok = std::all_of(man.checks.begin(), man.checks.end(), [](const CheckResult& c) { return c.pass; });
        man.status = ok ? RunManifest::Status::Passed : RunManifest::Status::ChecksFailed;
    } catch (const ConfigError& e) {
        man.status = RunManifest::Status::ValidationFailure;
        man.failure = e.what();
        man.failure_items = e.items();
    } catch (const ValidationError& e) {
        man.status = RunManifest::Status::ValidationFailure;
        man.failure = e.what();
    } catch (const NumericalError& e) {
        man.status = RunManifest::Status::NumericalFailure;
        man.failure = e.what();
    } catch (const IoError& e) {
        man.status = RunManifest::Status::IoFailure;
        man.failure = e.what();
    } catch (const fs::filesystem_error& e) {
        man.status = RunManifest::Status::IoFailure;
        man.failure = e.what();
    }
    man.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        write_manifest(man, cfg.out_dir);
    } catch (const Error&) {
        if (man.status == RunManifest::Status::Passed) {
            man.status = RunManifest::Status::IoFailure;
            man.failure = "cannot write manifest.json";
        }
    }
    return man;
}

RunManifest run_config(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::from_map(kv);
    } catch (const ConfigError& e) {
        RunManifest man;
        man.config = kv;
        man.model = kv.count("model") ? kv.at("model") : "";
        man.version = version();
        man.status = RunManifest::Status::ValidationFailure;
        man.failure = e.what();
        man.failure_items = e.items();
        if (kv.count("output.dir")) {
            try {
                fs::create_directories(kv.at("output.dir"));
                write_manifest(man, kv.at("output.dir"));
            } catch (const std::exception&) {
            }
        }
        return man;
    }
    return run(cfg);
}

} // namespace kgc
