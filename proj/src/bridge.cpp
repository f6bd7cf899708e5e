#include "kgcascade/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kgcascade/errors.hpp"
#include "kgcascade/fft.hpp"
#include "kgcascade/normal_form.hpp"

namespace kgc {

namespace {

constexpr double kPi = std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

void check_mu(const RegimeParams& r, const LatticeGrid& grid) {
    if (r.d != grid.d) throw StructuralError("regime dimension does not match the grid");
    if (std::abs(r.mu - grid.mu) > 1e-14 * grid.mu)
        throw StructuralError("regime mu does not match the grid spacing 2/(2N+1)");
}

RegimeCheckItem open_interval(std::string name, double v, double lo, double hi) {
    return RegimeCheckItem{std::move(name), v > lo && v < hi, v, lo, hi};
}

} // namespace

RegimeParams RegimeParams::make(int d, int ell, double beta, double alpha, double mu, double delta, double m,
                                double s, double lambda, double alpha_tilde) {
    if (d < 1 || d > 3) throw ParameterError("d must be 1, 2 or 3");
    if (ell < 1) throw ParameterError("ell must be >= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be finite and >= 0");
    if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
    if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("mu must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    if (!(m > 0.0)) throw ParameterError("m must be > 0");
    if (!(s >= 0.0)) throw ParameterError("s must be >= 0");
    if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
    RegimeParams r;
    r.d = d;
    r.ell = ell;
    r.beta = beta;
    r.alpha = alpha;
    r.mu = mu;
    r.eps_derived = std::pow(mu, 2.0 * (1.0 - double(ell) * alpha));
    r.delta = delta;
    r.m = m;
    r.s = s;
    r.lambda = lambda;
    r.nu_exp = double(ell) * alpha - 1.0;
    r.alpha_tilde = alpha_tilde > 0.0 ? alpha_tilde : 1.0 / (16.0 * double(ell));
    return r;
}

double RegimeParams::eps_torus() const { return kPi * kPi * eps_derived; }

double RegimeParams::beta_eff() const {
    return beta * nf::binomial(2 * ell + 2, ell + 1) / std::ldexp(1.0, ell + 1);
}

double RegimeParams::tau_of_t(double t) const { return 0.5 * std::pow(mu, 2.0 * ell * alpha) * t; }
double RegimeParams::t_of_tau(double tau) const { return 2.0 * tau * std::pow(mu, -2.0 * ell * alpha); }

NLSParams RegimeParams::nls_params() const {
    NLSParams p;
    p.eps = eps_torus();
    p.ell = ell;
    p.beta_eff = beta_eff();
    return p;
}

double RegimeParams::low_cutoff() const { return std::pow(mu, -(1.0 - delta)); }

double RegimeParams::validity_horizon(double T0) const {
    const double nu = 2.0 * ell + 1.0 / m;
    const double nl = nu * lambda;
    return T0 * std::pow(mu, -2.0 * (nl + ell * alpha * (1.0 - nl)));
}

bool RegimeReport::all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const RegimeCheckItem& i) { return i.pass; });
}

std::vector<double> alpha0_branches(double m, int d, int ell, double lambda) {
    const double nl = (2.0 * ell + 1.0 / m) * lambda;
    const double inv = 1.0 / double(ell);
    return {
        inv * (1.0 - (1.0 - d / 4.0) / (1.0 + nl)),
        inv * (1.0 - nl + std::sqrt((1.0 - nl) * (1.0 - nl) + 8.0 * nl)) / 4.0,
        inv * (d / 4.0 + 1.0 / 16.0),
        inv * kGolden,
    };
}

double alpha0(double m, int d, int ell, double lambda) {
    const auto b = alpha0_branches(m, d, ell, lambda);
    return *std::max_element(b.begin(), b.end());
}

double delta01(double m, int d, int ell, double lambda, double alpha1) {
    const double g = (1.0 - ell * alpha1) * 2.0 * lambda / (1.0 - 2.0 * ell * lambda);
    return 1.0 - (1.0 / 8.0) / (2.0 * m + d + 1.0 / 8.0) * (1.0 + g);
}

double delta02(double m, int d, int ell, double lambda, double alpha1) {
    const double g = (1.0 - ell * alpha1) * 2.0 * lambda / (1.0 - 2.0 * ell * lambda);
    return 1.0 - g / (2.0 * m + d);
}

RegimeReport regime_check(const RegimeParams& r) {
    RegimeReport rep;
    const double inv = 1.0 / double(r.ell);
    const double nu = 2.0 * r.ell + 1.0 / r.m;
    rep.alpha0 = alpha0(r.m, r.d, r.ell, r.lambda);
    rep.alpha1 = inv - r.alpha_tilde;
    rep.delta0 = std::max(delta01(r.m, r.d, r.ell, r.lambda, rep.alpha1), delta02(r.m, r.d, r.ell, r.lambda, rep.alpha1));
    rep.items.push_back(open_interval("alpha_small_dispersion", r.alpha, kGolden * inv, inv));
    rep.items.push_back(open_interval("alpha_approximation", r.alpha, rep.alpha0, rep.alpha1));
    rep.items.push_back(open_interval("alpha_tilde", r.alpha_tilde, inv / 64.0, inv / 8.0));
    rep.items.push_back(open_interval("delta", r.delta, rep.delta0, 1.0));
    rep.items.push_back(open_interval("lambda", r.lambda, 0.0, 1.0 / nu));
    // (-3 + sqrt5)/2 < nu <= 0
    const double lo = (-3.0 + std::sqrt(5.0)) / 2.0;
    rep.items.push_back(RegimeCheckItem{"nu_window", r.nu_exp > lo && r.nu_exp <= 0.0, r.nu_exp, lo, 0.0});
    return rep;
}

ContinuumModes lattice_to_continuum_modes(const ModeSpectrum& spec, const RegimeParams& r, const LatticeGrid& grid) {
    check_mu(r, grid);
    if (spec.box != grid.box || spec.Qhat.size() != grid.Nd || spec.Phat.size() != grid.Nd)
        throw StructuralError("spectrum does not match grid");
    const double f = std::pow(grid.mu, 0.5 * grid.d - r.alpha);
    ContinuumModes c{grid.box, spec.Qhat, spec.Phat};
    for (auto& v : c.qhat) v *= f;
    for (auto& v : c.phat) v *= f;
    return c;
}

ModeSpectrum continuum_to_lattice_modes(const ContinuumModes& c, const RegimeParams& r, const LatticeGrid& grid) {
    check_mu(r, grid);
    if (c.box != grid.box || c.qhat.size() != grid.Nd || c.phat.size() != grid.Nd)
        throw StructuralError("continuum modes must live on the lattice box");
    const double f = std::pow(grid.mu, r.alpha - 0.5 * grid.d);
    ModeSpectrum spec;
    spec.box = grid.box;
    spec.Qhat = c.qhat;
    spec.Phat = c.phat;
    for (auto& v : spec.Qhat) v *= f;
    for (auto& v : spec.Phat) v *= f;
    fill_mode_energies(spec, grid);
    return spec;
}

double aliased_specific_energy(const ContinuumModes& c, const std::vector<int>& K, const RegimeParams& r,
                               const LatticeGrid& grid) {
    check_mu(r, grid);
    const int d = grid.d;
    if (int(K.size()) != d || c.box.dim() != d) throw StructuralError("mode index must have d components");
    const double w2 = omega_squared(K.data(), grid);
    const int n = grid.side();
    const int H = c.box.half();
    // Alias shells L in (2N+1) Z^d with K + L inside the data box.
    const auto nd = static_cast<std::size_t>(d);
    std::vector<int> lo(nd), hi(nd), L(nd), KL(nd);
    for (int i = 0; i < d; ++i) {
        const int k = K[std::size_t(i)];
        lo[std::size_t(i)] = int(std::ceil(double(-H - k) / n));
        hi[std::size_t(i)] = int(std::floor(double(H - k) / n));
        if (lo[std::size_t(i)] > hi[std::size_t(i)]) return 0.0;
        L[std::size_t(i)] = lo[std::size_t(i)];
    }
    KahanSum acc;
    while (true) {
        for (int i = 0; i < d; ++i) KL[std::size_t(i)] = K[std::size_t(i)] + n * L[std::size_t(i)];
        const std::size_t idx = c.box.flat(KL.data());
        acc += 0.5 * (std::norm(c.phat[idx]) + w2 * std::norm(c.qhat[idx]));
        int i = d - 1;
        while (i >= 0 && L[std::size_t(i)] == hi[std::size_t(i)]) {
            L[std::size_t(i)] = lo[std::size_t(i)];
            --i;
        }
        if (i < 0) break;
        ++L[std::size_t(i)];
    }
    return acc.value();
}

ContinuumModes continuum_from_nls(const NLSState& s, double t) {
    const int d = s.box.dim();
    const cplx f = std::sqrt(2.0) * std::pow(kPi, -0.5 * d) * std::polar(1.0, t);
    ContinuumModes c{s.box, std::vector<cplx>(s.box.size()), std::vector<cplx>(s.box.size())};
    for (std::size_t i = 0; i < s.box.size(); ++i) {
        const cplx a = f * s.xi[i];
        const cplx b = std::conj(f * s.xi[s.box.mirror(i)]);
        c.qhat[i] = 0.5 * (a + b);
        c.phat[i] = cplx(0.0, 0.5) * (a - b);
    }
    return c;
}

NLSState nls_from_lattice(const LatticeState& s, const RegimeParams& r, const LatticeGrid& grid, int H) {
    if (H < 0) throw ParameterError("truncation half-width must be >= 0");
    const ContinuumModes c = lattice_to_continuum_modes(dft_modes(s, grid), r, grid);
    const int d = grid.d;
    const cplx f = std::pow(kPi, 0.5 * d) / std::sqrt(2.0) * std::polar(1.0, -s.t);
    NLSState out = NLSState::zeros(H, d);
    out.tau = r.tau_of_t(s.t);
    std::vector<int> h(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < out.box.size(); ++i) {
        out.box.coords(i, h.data());
        if (!grid.box.contains(h.data())) continue;
        const std::size_t j = grid.box.flat(h.data());
        out.xi[i] = f * (c.qhat[j] - cplx(0.0, 1.0) * c.phat[j]);
    }
    return out;
}

ApproxLattice build_approximate_lattice_solution(const NLSState& s, const RegimeParams& r, const LatticeGrid& grid,
                                                 double t, double T0) {
    check_mu(r, grid);
    if (s.box.dim() != grid.d) throw StructuralError("NLS state dimension does not match the grid");
    const ContinuumModes c = continuum_from_nls(s, t);
    // Sampling at y = mu j folds K onto k = K mod (2N+1).
    std::vector<cplx> qk(grid.Nd, 0.0), pk(grid.Nd, 0.0);
    const int d = grid.d;
    const int n = grid.side();
    std::vector<int> K(static_cast<std::size_t>(d)), k(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < c.box.size(); ++i) {
        c.box.coords(i, K.data());
        for (int a = 0; a < d; ++a) {
            int v = K[std::size_t(a)] % n;
            if (v > grid.N) v -= n;
            if (v < -grid.N) v += n;
            k[std::size_t(a)] = v;
        }
        const std::size_t j = grid.box.flat(k.data());
        qk[j] += c.qhat[i];
        pk[j] += c.phat[i];
    }
    const double f = std::pow(grid.mu, r.alpha - 0.5 * d);
    for (auto& v : qk) v *= f;
    for (auto& v : pk) v *= f;
    CenteredDft dft(grid.box);
    const auto Q = dft.inverse(qk);
    const auto P = dft.inverse(pk);
    ApproxLattice out;
    out.state = LatticeState::zeros(grid);
    out.state.t = t;
    for (std::size_t i = 0; i < grid.Nd; ++i) {
        out.state.Q[i] = Q[i].real();
        out.state.P[i] = P[i].real();
        out.max_imag = std::max({out.max_imag, std::abs(Q[i].imag()), std::abs(P[i].imag())});
    }
    out.beyond_horizon = std::abs(t) > r.validity_horizon(T0) * (1.0 + 1e-12);
    return out;
}

double approximation_error(const LatticeState& a, const LatticeState& b) {
    if (a.Q.size() != b.Q.size() || a.P.size() != b.P.size() || a.Q.size() != a.P.size())
        throw StructuralError("approximation_error needs states on the same grid");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.Q.size(); ++i)
        worst = std::max(worst, std::abs(a.Q[i] - b.Q[i]) + std::abs(a.P[i] - b.P[i]));
    return worst;
}

double continuum_orbit_energy(const ContinuumModes& c, const std::vector<int>& K) {
    const int d = c.box.dim();
    if (int(K.size()) != d) throw StructuralError("mode index must have d components");
    std::vector<int> f(static_cast<std::size_t>(d));
    KahanSum acc;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        bool dup = false;
        for (int i = 0; i < d; ++i) {
            const bool flip = (mask >> i) & 1u;
            if (flip && K[std::size_t(i)] == 0) dup = true;
            f[std::size_t(i)] = flip ? -K[std::size_t(i)] : K[std::size_t(i)];
        }
        if (dup || !c.box.contains(f.data())) continue;
        const std::size_t idx = c.box.flat(f.data());
        acc += 0.5 * std::norm(c.qhat[idx] - cplx(0.0, 1.0) * c.phat[idx]);
    }
    return acc.value();
}

SpectralComparison compare_spectra(const SpecificSpectrum& lattice_spec, const ContinuumModes& c,
                                   const RegimeParams& r, const LatticeGrid& grid) {
    check_mu(r, grid);
    if (lattice_spec.N != grid.N || lattice_spec.d != grid.d) throw StructuralError("specific spectrum does not match grid");
    const double scale = std::pow(grid.mu, -2.0 * r.alpha);
    const double cutoff = r.low_cutoff();
    SpectralComparison out;
    KahanSum high;
    for (const auto& e : lattice_spec.entries) {
        const double K = euclid(e.k.data(), grid.d);
        const double lat = e.E_kappa * scale;
        if (K <= cutoff)
            out.low_mode_error_max = std::max(out.low_mode_error_max, std::abs(lat - continuum_orbit_energy(c, e.k)));
        else
            high += lat;
    }
    out.high_mode_mass = high.value();
    return out;
}

std::vector<SyncRecord> coevolve(const CoevolveConfig& cfg, const std::function<void(const SyncRecord&)>& observer) {
    if (cfg.n_sync < 1) throw ParameterError("n_sync must be >= 1");
    if (!(cfg.tau_end > 0.0)) throw ParameterError("tau_end must be > 0");
    if (!(cfg.dtau > 0.0)) throw ParameterError("dtau must be > 0");
    if (!(cfg.dt >= 0.0)) throw ParameterError("dt must be >= 0 (0 selects the default)");
    if (!(cfg.monitor_factor > 1.0)) throw ParameterError("monitor factor must be > 1");
    const LatticeGrid grid = LatticeGrid::make(cfg.N, cfg.regime.d);
    const RegimeParams& r0 = cfg.regime;
    const RegimeParams r = RegimeParams::make(r0.d, r0.ell, r0.beta, r0.alpha, grid.mu, r0.delta, r0.m, r0.s,
                                              r0.lambda, r0.alpha_tilde);
    const KGParams kg{r.beta, r.ell};
    KGIntegrator lattice(grid, kg);
    LatticeState Ls = make_single_mode_datum(cfg.k0, cfg.C0, r.alpha, grid, kg);

    // Matching amplitude: Q = mu^alpha sqrt2 a prod sin at t = 0.
    const double a = std::sqrt(cfg.C0) / mode_frequency(cfg.k0, grid);
    NLSState Ns = nls_single_mode(cfg.H_nls, cfg.k0, a * std::pow(kPi, 0.5 * grid.d));
    NLSSolver nls(cfg.H_nls, grid.d, r.nls_params(), cfg.guard_tol);

    const double H0 = hamiltonian_energy(Ls, kg, grid);
    auto l1s = [&](const NLSState& s) { return weighted_norm(WeightedSeq{r.s, 1, s.box, s.xi}); };
    const double l1s0 = l1s(Ns);
    const double dt_max = cfg.dt > 0.0 ? cfg.dt : default_dt(grid);
    const double horizon = r.validity_horizon(cfg.T0);
    const double dtau_slot = cfg.tau_end / cfg.n_sync;
    const auto n_tau = std::size_t(std::max(1.0, std::ceil(dtau_slot / cfg.dtau - 1e-9)));

    std::vector<SyncRecord> out;
    for (int i = 0; i <= cfg.n_sync; ++i) {
        const double tau = cfg.tau_end * double(i) / cfg.n_sync;
        const double t = r.t_of_tau(tau);
        if (i > 0) {
            nls.advance(Ns, dtau_slot / double(n_tau), n_tau);
            Ns.tau = tau;
            const double span = t - Ls.t;
            const auto n_t = std::size_t(std::max(1.0, std::ceil(span / dt_max - 1e-9)));
            lattice.advance(Ls, span / double(n_t), n_t);
            Ls.t = t;
        }
        SyncRecord rec;
        rec.t = t;
        rec.tau = tau;
        const ApproxLattice approx = build_approximate_lattice_solution(Ns, r, grid, t, cfg.T0);
        rec.sup_error = approximation_error(Ls, approx.state);
        rec.beyond_horizon = t > horizon * (1.0 + 1e-12);
        const ModeSpectrum spec = dft_modes(Ls, grid);
        const SpecificSpectrum ss = specific_spectrum(spec, grid);
        const SpectralComparison cmp = compare_spectra(ss, continuum_from_nls(Ns, t), r, grid);
        rec.low_mode_error_max = cmp.low_mode_error_max;
        rec.high_mode_mass = cmp.high_mode_mass;
        rec.cascade_metric = cascade_metric(ss, r.m, r.low_cutoff(), grid);
        rec.cascade_metric_all = cascade_metric(ss, r.m, std::numeric_limits<double>::max(), grid);
        rec.energy = hamiltonian_energy(Ls, kg, grid);
        rec.energy_drift = H0 != 0.0 ? std::abs(rec.energy - H0) / std::abs(H0) : std::abs(rec.energy - H0);
        rec.nls_l1s_ratio = l1s0 > 0.0 ? l1s(Ns) / l1s0 : 1.0;
        out.push_back(rec);
        if (observer) observer(rec);
        if (rec.nls_l1s_ratio > cfg.monitor_factor)
            throw NumericalError("NLS l1_s norm grew by " + std::to_string(rec.nls_l1s_ratio) + " at tau = " +
                                 std::to_string(tau) + ", beyond the monitor factor " +
                                 std::to_string(cfg.monitor_factor));
    }
    return out;
}

} // namespace kgc
